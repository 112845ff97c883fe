#include "proto/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "proto/rng.hpp"

namespace proto {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
    if (line == 0) throw std::runtime_error(what);  // no line context (model files)
    throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

Vec to_vec(const nlohmann::json& arr, std::size_t line, const char* what) {
    if (!arr.is_array()) fail_line(line, std::string(what) + " is not an array");
    Vec v;
    v.reserve(arr.size());
    for (const auto& e : arr) {
        if (!e.is_number()) fail_line(line, std::string(what) + " has a non-numeric entry");
        v.push_back(e.get<double>());
    }
    return v;
}

// D x D lower-triangular Cholesky factor; throws if not positive-definite.
std::vector<Vec> cholesky(const std::vector<Vec>& a) {
    const std::size_t d = a.size();
    for (std::size_t i = 0; i < d; ++i) {
        if (a[i].size() != d) throw std::invalid_argument("covariance is not square");
        for (std::size_t j = 0; j < d; ++j)
            if (std::abs(a[i][j] - a[j][i]) > 1e-12)
                throw std::invalid_argument("covariance is not symmetric");
    }
    std::vector<Vec> l(d, Vec(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (std::size_t m = 0; m < j; ++m) s -= l[i][m] * l[j][m];
            if (i == j) {
                if (s <= 0.0) throw std::invalid_argument("covariance is not positive-definite");
                l[i][j] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    return l;
}

}  // namespace

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    ordered_json header;
    header["D"] = data.dim;
    header["C"] = data.classes;
    out << header.dump() << '\n';
    for (const Instance& inst : data.instances) {
        ordered_json j;
        j["id"] = inst.id;
        j["features"] = inst.features;
        j["label"] = inst.label;
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw std::runtime_error("empty dataset file");
    ++line_no;
    nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.contains("D") || !header.contains("C"))
        fail_line(line_no, "malformed header, expected {\"D\":..,\"C\":..}");

    Dataset data;
    data.dim = header["D"].get<int>();
    data.classes = header["C"].get<int>();
    if (data.dim < 1) fail_line(line_no, "D must be >= 1");
    if (data.classes < 2) fail_line(line_no, "C must be >= 2");

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) fail_line(line_no, "malformed record");
        Instance inst;
        inst.id = j.value("id", "");
        if (!j.contains("features")) fail_line(line_no, "missing features");
        if (!j.contains("label")) fail_line(line_no, "missing label");
        for (const auto& row : j["features"])
            inst.features.push_back(to_vec(row, line_no, "feature row"));
        inst.label = to_vec(j["label"], line_no, "label");

        if (inst.features.empty()) fail_line(line_no, "empty feature set");
        for (const Vec& x : inst.features) {
            if (static_cast<int>(x.size()) != data.dim)
                fail_line(line_no, "feature row of wrong length (expected " +
                                       std::to_string(data.dim) + ", got " +
                                       std::to_string(x.size()) + ")");
            if (!all_finite(x)) fail_line(line_no, "non-finite feature value");
        }
        if (static_cast<int>(inst.label.size()) != data.classes)
            fail_line(line_no, "label of wrong length");
        double sum = 0.0;
        for (double p : inst.label) {
            if (!(p >= 0.0 && p <= 1.0)) fail_line(line_no, "label entry outside [0,1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) fail_line(line_no, "label not a distribution");

        data.instances.push_back(std::move(inst));
    }
    if (data.instances.empty()) throw std::runtime_error("dataset has no instances");
    return data;
}

void save_model(const Model& m, const std::filesystem::path& path) {
    validate(m);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    ordered_json j;
    j["K"] = m.codebook.size();
    j["D"] = m.codebook.dim();
    j["C"] = m.weights.classes();
    j["centers"] = m.codebook.centers;
    j["beta"] = m.codebook.beta;
    j["theta"] = m.weights.theta;
    j["lambda"] = m.weights.lambda;
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error("malformed model file " + path.string());
    for (const char* key : {"K", "D", "C", "centers", "beta", "theta", "lambda"})
        if (!j.contains(key)) throw std::runtime_error(std::string("model file missing \"") + key + "\"");

    Model m;
    const int k = j["K"].get<int>();
    const int d = j["D"].get<int>();
    const int c = j["C"].get<int>();
    for (const auto& row : j["centers"]) m.codebook.centers.push_back(to_vec(row, 0, "center"));
    m.codebook.beta = j["beta"].get<double>();
    for (const auto& row : j["theta"]) m.weights.theta.push_back(to_vec(row, 0, "theta row"));
    m.weights.lambda = j["lambda"].get<double>();

    if (m.codebook.size() != k || m.codebook.dim() != d)
        throw std::runtime_error("model file: centers shape does not match K/D");
    if (m.weights.classes() != c || m.weights.k() != k)
        throw std::runtime_error("model file: theta shape does not match C/K");
    validate(m);
    return m;
}

SyntheticConfig figure1_config(std::uint64_t seed) {
    SyntheticConfig cfg;
    cfg.instances_per_class = 10;  // two classes, 20 instances total
    cfg.m_min = 1;
    cfg.m_max = 20;
    cfg.class_means = {{0.0, 0.0}, {2.0, 2.0}};
    cfg.covariances = {{{1.0, 0.0}, {0.0, 1.0}}, {{1.0, 0.95}, {0.95, 1.0}}};
    cfg.seed = seed;
    return cfg;
}

Dataset generate_figure1_toy(const SyntheticConfig& cfg) {
    if (cfg.class_means.empty() || cfg.class_means.size() != cfg.covariances.size())
        throw std::invalid_argument("class_means and covariances must align");
    if (cfg.m_min < 1 || cfg.m_max < cfg.m_min)
        throw std::invalid_argument("bad M range");
    const int c = static_cast<int>(cfg.class_means.size());
    const int d = static_cast<int>(cfg.class_means.front().size());

    std::vector<std::vector<Vec>> chol;
    chol.reserve(c);
    for (const auto& cov : cfg.covariances) {
        if (static_cast<int>(cov.size()) != d)
            throw std::invalid_argument("covariance does not match mean dimension");
        chol.push_back(cholesky(cov));
    }

    Rng rng(cfg.seed);
    Dataset data;
    data.dim = d;
    data.classes = c;
    const int total = cfg.instances_per_class * c;
    for (int n = 0; n < total; ++n) {
        const int cls = static_cast<int>(rng.uniform_int(0, c - 1));
        const int m = static_cast<int>(rng.uniform_int(cfg.m_min, cfg.m_max));
        Instance inst;
        inst.id = "i" + std::to_string(n);
        inst.label.assign(c, 0.0);
        inst.label[cls] = 1.0;
        inst.features.reserve(m);
        for (int v = 0; v < m; ++v) {
            Vec noise(d);
            for (double& e : noise) e = rng.normal();
            Vec x = cfg.class_means[cls];
            for (int i = 0; i < d; ++i) {
                double s = 0.0;
                for (int j = 0; j <= i; ++j) s += chol[cls][i][j] * noise[j];
                x[i] += s;
            }
            inst.features.push_back(std::move(x));
        }
        data.instances.push_back(std::move(inst));
    }
    return data;
}

Dataset smooth_labels(Dataset data, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
    const double uniform = alpha / static_cast<double>(data.classes);
    for (Instance& inst : data.instances)
        for (double& p : inst.label) p = (1.0 - alpha) * p + uniform;
    return data;
}

Dataset group_records_to_soft_labels(const RecordTable& table) {
    if (table.attributes.empty()) throw std::invalid_argument("empty record table");
    if (table.attributes.size() != table.class_values.size())
        throw std::invalid_argument("attribute and class rows must align");
    if (table.class_count < 2) throw std::invalid_argument("class count must be >= 2");
    const std::size_t arity = table.attributes.front().size();

    // Group keys in first-appearance order.
    std::map<std::vector<int>, std::size_t> index;
    std::vector<std::vector<int>> keys;
    std::vector<std::vector<int>> counts;
    std::vector<std::size_t> sizes;
    for (std::size_t r = 0; r < table.attributes.size(); ++r) {
        const std::vector<int>& tuple = table.attributes[r];
        if (tuple.size() != arity) throw std::invalid_argument("ragged attribute tuple");
        const int cls = table.class_values[r];
        if (cls < 1 || cls > table.class_count)
            throw std::invalid_argument("class value out of range in record " + std::to_string(r));
        auto [it, fresh] = index.try_emplace(tuple, keys.size());
        if (fresh) {
            keys.push_back(tuple);
            counts.emplace_back(table.class_count, 0);
            sizes.push_back(0);
        }
        ++counts[it->second][cls - 1];
        ++sizes[it->second];
    }

    Dataset data;
    data.dim = static_cast<int>(arity);
    data.classes = table.class_count;
    for (std::size_t g = 0; g < keys.size(); ++g) {
        Instance inst;
        inst.id = "g" + std::to_string(g);
        Vec coded(keys[g].begin(), keys[g].end());
        inst.features.assign(sizes[g], coded);
        inst.label.assign(table.class_count, 0.0);
        for (int j = 0; j < table.class_count; ++j)
            inst.label[j] = static_cast<double>(counts[g][j]) / static_cast<double>(sizes[g]);
        data.instances.push_back(std::move(inst));
    }
    return data;
}

SplitResult stratified_split(const Dataset& data, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("fraction must be in (0,1)");

    const auto argmax = [](const Vec& v) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < v.size(); ++j)
            if (v[j] > v[best]) best = j;
        return best;
    };

    std::vector<std::vector<std::size_t>> strata(data.classes);
    for (std::size_t n = 0; n < data.size(); ++n)
        strata[argmax(data.instances[n].label)].push_back(n);

    Rng rng(seed);
    SplitResult out;
    out.train.dim = out.test.dim = data.dim;
    out.train.classes = out.test.classes = data.classes;

    // Largest-remainder rounding of per-stratum train counts; singleton strata
    // go wholly to train.
    std::size_t forced = 0;
    std::size_t eligible = 0;
    for (const auto& s : strata) {
        if (s.empty()) continue;
        if (s.size() < 2) {
            forced += s.size();
            ++out.singleton_strata;
        } else {
            eligible += s.size();
        }
    }
    const auto global_target =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(data.size())));
    const std::size_t target = global_target > forced ? global_target - forced : 0;

    std::vector<std::size_t> take(strata.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;  // (-frac, stratum): big first
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < strata.size(); ++c) {
        if (strata[c].size() < 2) {
            take[c] = strata[c].size();
            continue;
        }
        const double quota = fraction * static_cast<double>(strata[c].size());
        take[c] = static_cast<std::size_t>(quota);
        assigned += take[c];
        remainders.emplace_back(-(quota - static_cast<double>(take[c])), c);
    }
    std::sort(remainders.begin(), remainders.end());
    for (const auto& [neg_frac, c] : remainders) {
        if (assigned >= target) break;
        if (take[c] < strata[c].size()) {
            ++take[c];
            ++assigned;
        }
    }

    for (std::size_t c = 0; c < strata.size(); ++c) {
        std::vector<std::size_t>& members = strata[c];
        rng.shuffle(members);
        std::vector<std::size_t> train_ids(members.begin(), members.begin() + take[c]);
        std::vector<std::size_t> test_ids(members.begin() + take[c], members.end());
        std::sort(train_ids.begin(), train_ids.end());  // keep input order inside each side
        std::sort(test_ids.begin(), test_ids.end());
        for (std::size_t n : train_ids) out.train.instances.push_back(data.instances[n]);
        for (std::size_t n : test_ids) out.test.instances.push_back(data.instances[n]);
    }
    return out;
}

}  // namespace proto
