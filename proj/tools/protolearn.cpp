// Command-line front end: synthesize data, train models, evaluate, predict,
// and run gradient checks. Exit codes: 0 success, 1 usage error, 2 data or
// invariant error, 3 gradcheck failure.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "proto/baselines.hpp"
#include "proto/classifier.hpp"
#include "proto/data.hpp"
#include "proto/gradients.hpp"
#include "proto/metrics.hpp"
#include "proto/rng.hpp"
#include "proto/train.hpp"

namespace {

using nlohmann::ordered_json;
using namespace proto;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitGradcheck = 3;

Assign parse_encoding(const std::string& name) {
    if (name == "soft") return Assign::Soft;
    if (name == "hard") return Assign::Hard;
    throw std::invalid_argument("unknown encoding '" + name + "' (expected soft or hard)");
}

void write_report(const TrainReport& rep, const std::string& path) {
    ordered_json j;
    j["initial_objective"] = rep.initial_objective;
    j["objective_trace"] = rep.objective_trace;
    j["rounds_completed"] = rep.rounds_completed;
    j["converged"] = rep.converged;
    j["kmeans_degenerate"] = rep.kmeans_degenerate;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump() << '\n';
}

int cmd_synth(const std::string& out_path, const std::string& preset, std::uint64_t seed,
              int per_class, int m_min, int m_max, double alpha) {
    SyntheticConfig cfg;
    if (preset == "figure1") {
        cfg = figure1_config(seed);
    } else if (preset == "soft4") {
        // Four overlapping 2-D Gaussians; labels smoothed toward uniform.
        cfg.class_means = {{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}, {2.0, 2.0}};
        cfg.covariances.assign(4, {{1.0, 0.0}, {0.0, 1.0}});
        cfg.covariances[3] = {{1.0, 0.6}, {0.6, 1.0}};
        cfg.instances_per_class = 100;
        cfg.m_min = 1;
        cfg.m_max = 5;
        cfg.seed = seed;
    } else {
        throw std::invalid_argument("unknown preset '" + preset + "'");
    }
    if (per_class > 0) cfg.instances_per_class = per_class;
    if (m_min > 0) cfg.m_min = m_min;
    if (m_max > 0) cfg.m_max = m_max;

    Dataset data = generate_figure1_toy(cfg);
    if (preset == "soft4") data = smooth_labels(std::move(data), alpha);
    save_dataset(data, out_path);
    std::cout << "wrote " << data.size() << " instances to " << out_path << "\n";
    return kExitOk;
}

int cmd_train(const std::string& data_path, const std::string& test_path,
              const std::string& out_path, const std::string& report_path,
              const std::string& mode, int k, double lambda, int rounds, std::uint64_t seed,
              double beta_init, double split_fraction) {
    Dataset data = load_dataset(data_path);
    validate(data);
    Dataset held_out;
    if (split_fraction > 0.0) {
        SplitResult split = stratified_split(data, split_fraction, seed);
        data = std::move(split.train);
        held_out = std::move(split.test);
    }
    if (!test_path.empty()) held_out = load_dataset(test_path);

    TrainConfig tc;
    tc.k = k;
    tc.lambda = lambda;
    tc.rounds = rounds;
    tc.seed = seed;
    if (beta_init > 0.0) tc.beta_init = beta_init;
    OptimizerConfig oc;

    Model model;
    TrainReport report;
    if (mode == "prob") {
        std::tie(model, report) = coordinate_ascent_train(data, tc, oc);
    } else if (mode == "standard") {
        model = train_standard_prototype(data, tc, oc);
        const double obj = objective_from_encodings(
            encode_dataset(data, model.codebook, Assign::Hard), data, model.weights);
        report.initial_objective = obj;
        report.objective_trace.push_back(obj);
        report.rounds_completed = 1;
        report.converged = true;
    } else {
        throw std::invalid_argument("unknown mode '" + mode + "' (expected prob or standard)");
    }

    save_model(model, out_path);
    const std::string rep_path = report_path.empty() ? out_path + ".report.json" : report_path;
    write_report(report, rep_path);
    std::cout << "wrote model to " << out_path << " and report to " << rep_path << "\n";

    if (!held_out.instances.empty()) {
        const Assign enc = mode == "standard" ? Assign::Hard : Assign::Soft;
        const MetricsReport metrics = evaluate(held_out, model, enc);
        ordered_json j;
        j["accuracy"] = metrics.accuracy;
        j["mean_test_loglik"] = metrics.mean_test_loglik;
        j["mean_kl_bits"] = metrics.mean_kl_bits;
        std::cout << j.dump() << "\n";
    }
    return kExitOk;
}

int cmd_eval(const std::string& data_path, const std::string& model_path,
             const std::string& encoding) {
    const Dataset data = load_dataset(data_path);
    const Model model = load_model(model_path);
    const MetricsReport rep = evaluate(data, model, parse_encoding(encoding));
    ordered_json j;
    j["accuracy"] = rep.accuracy;
    j["mean_test_loglik"] = rep.mean_test_loglik;
    j["mean_kl_bits"] = rep.mean_kl_bits;
    std::cout << j.dump() << "\n";
    return kExitOk;
}

int cmd_predict(const std::string& data_path, const std::string& model_path,
                const std::string& out_path, const std::string& encoding) {
    const Dataset data = load_dataset(data_path);
    validate(data);
    const Model model = load_model(model_path);
    check_conformable(data, model);
    const Assign mode = parse_encoding(encoding);

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
    for (const Instance& inst : data.instances) {
        const Vec z = encode_instance(inst.features, model.codebook, mode);
        ordered_json j;
        j["id"] = inst.id;
        j["posterior"] = class_posterior(z, model.weights);
        out << j.dump() << '\n';
    }
    std::cout << "wrote posteriors for " << data.size() << " instances to " << out_path << "\n";
    return kExitOk;
}

// A small random problem, pure function of the seed.
int cmd_gradcheck(std::uint64_t seed, double step, double threshold) {
    Rng rng(seed);
    const int n = 4, d = 2, k = 3, c = 3;

    Dataset data;
    data.dim = d;
    data.classes = c;
    for (int i = 0; i < n; ++i) {
        Instance inst;
        inst.id = "r" + std::to_string(i);
        const int m = static_cast<int>(rng.uniform_int(1, 4));
        for (int v = 0; v < m; ++v) {
            Vec x(d);
            for (double& e : x) e = 2.0 * rng.normal();
            inst.features.push_back(std::move(x));
        }
        Vec label(c);
        double sum = 0.0;
        for (double& p : label) {
            p = rng.uniform(0.01, 1.0);
            sum += p;
        }
        for (double& p : label) p /= sum;
        inst.label = label;
        data.instances.push_back(std::move(inst));
    }

    Model m;
    m.codebook.centers.assign(k, Vec(d));
    for (Vec& mu : m.codebook.centers)
        for (double& e : mu) e = rng.normal();
    m.codebook.beta = rng.uniform(0.3, 2.0);
    m.weights = zero_weights(c, k, 0.1);
    for (Vec& row : m.weights.theta)
        for (double& t : row) t = rng.normal();

    const FiniteDiffReport rep = finite_diff_check(data, m, step);
    ordered_json j;
    j["max_rel_centers"] = rep.max_rel_centers;
    j["max_rel_beta"] = rep.max_rel_beta;
    j["max_rel_theta"] = rep.max_rel_theta;
    j["step"] = rep.step;
    std::cout << j.dump() << "\n";
    return rep.max_rel() <= threshold ? kExitOk : kExitGradcheck;
}

int cmd_baseline(const std::string& data_path, const std::string& out_path, int k, double lambda,
                 std::uint64_t seed, double beta_init, bool soft_encoding, int lvq_steps,
                 double eta) {
    const Dataset data = load_dataset(data_path);
    validate(data);

    TrainConfig tc;
    tc.k = k;
    tc.lambda = lambda;
    tc.seed = seed;
    if (beta_init > 0.0) tc.beta_init = beta_init;
    OptimizerConfig oc;

    Model model = train_standard_prototype(data, tc, oc, soft_encoding);
    for (int step = 0; step < lvq_steps; ++step) {
        const Instance& inst = data.instances[step % data.size()];
        model.codebook.centers = relaxed_lvq_gradient_step(model, inst, eta);
    }

    save_model(model, out_path);
    std::cout << "wrote baseline model to " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discriminative prototype representation learning"};
    app.require_subcommand(1);

    std::string data_path, test_path, out_path, model_path, report_path;
    std::string mode = "prob", encoding = "soft", preset = "figure1";
    int k = 2, rounds = 20, per_class = 0, m_min = 0, m_max = 0, lvq_steps = 0;
    double lambda = 0.0, beta_init = 0.0, split_fraction = 0.0, step = 1e-5, eta = 0.1;
    double alpha = 0.2, threshold = 1e-5;
    std::uint64_t seed = 0;
    bool soft_encoding = false;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("--out", out_path, "output dataset path")->required();
    synth->add_option("--preset", preset, "figure1 | soft4");
    synth->add_option("--seed", seed, "random seed");
    synth->add_option("--per-class", per_class, "instances per class (0 = preset default)");
    synth->add_option("--m-min", m_min, "min feature vectors per instance");
    synth->add_option("--m-max", m_max, "max feature vectors per instance");
    synth->add_option("--alpha", alpha, "label smoothing for soft presets");

    auto* train = app.add_subcommand("train", "Train a model");
    train->add_option("--data", data_path, "training dataset")->required();
    train->add_option("--test", test_path, "held-out dataset to score after training");
    train->add_option("--out", out_path, "output model path")->required();
    train->add_option("--report", report_path, "training report path (default <out>.report.json)");
    train->add_option("--mode", mode, "prob | standard");
    train->add_option("--k", k, "prototype count");
    train->add_option("--lambda", lambda, "regularization strength");
    train->add_option("--rounds", rounds, "coordinate-ascent rounds");
    train->add_option("--seed", seed, "random seed");
    train->add_option("--beta-init", beta_init, "initial beta (0 = data-driven default)");
    train->add_option("--split-fraction", split_fraction,
                      "train on a stratified fraction of --data (0 = use all)");

    auto* eval = app.add_subcommand("eval", "Evaluate a model on a dataset");
    eval->add_option("--data", data_path, "evaluation dataset")->required();
    eval->add_option("--model", model_path, "model path")->required();
    eval->add_option("--encoding", encoding, "soft | hard (hard for standard-prototype models)");

    auto* predict = app.add_subcommand("predict", "Write per-instance posteriors");
    predict->add_option("--data", data_path, "input dataset")->required();
    predict->add_option("--model", model_path, "model path")->required();
    predict->add_option("--out", out_path, "output path")->required();
    predict->add_option("--encoding", encoding, "soft | hard");

    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check on a seeded problem");
    gradcheck->add_option("--seed", seed, "random seed");
    gradcheck->add_option("--step", step, "central-difference step");
    gradcheck->add_option("--threshold", threshold, "max acceptable relative error");

    auto* baseline = app.add_subcommand("baseline", "Train the standard-prototype baseline");
    baseline->add_option("--data", data_path, "training dataset")->required();
    baseline->add_option("--out", out_path, "output model path")->required();
    baseline->add_option("--k", k, "prototype count");
    baseline->add_option("--lambda", lambda, "regularization strength");
    baseline->add_option("--seed", seed, "random seed");
    baseline->add_option("--beta-init", beta_init, "beta stored in the model (0 = data-driven)");
    baseline->add_flag("--soft-encoding", soft_encoding, "encode with frozen soft assignments");
    baseline->add_option("--lvq-steps", lvq_steps, "relaxed LVQ steps to apply after training");
    baseline->add_option("--eta", eta, "LVQ learning rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth->parsed())
            return cmd_synth(out_path, preset, seed, per_class, m_min, m_max, alpha);
        if (train->parsed())
            return cmd_train(data_path, test_path, out_path, report_path, mode, k, lambda, rounds,
                             seed, beta_init, split_fraction);
        if (eval->parsed()) return cmd_eval(data_path, model_path, encoding);
        if (predict->parsed()) return cmd_predict(data_path, model_path, out_path, encoding);
        if (gradcheck->parsed()) return cmd_gradcheck(seed, step, threshold);
        if (baseline->parsed())
            return cmd_baseline(data_path, out_path, k, lambda, seed, beta_init, soft_encoding,
                                lvq_steps, eta);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
