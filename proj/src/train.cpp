#include "proto/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "proto/classifier.hpp"
#include "proto/encoder.hpp"
#include "proto/gradients.hpp"

namespace proto {

namespace {

Vec pack_theta(const Weights& w) {
    Vec x;
    x.reserve(static_cast<std::size_t>(w.classes()) * w.k());
    for (const Vec& row : w.theta) x.insert(x.end(), row.begin(), row.end());
    return x;
}

void unpack_theta(const Vec& x, Weights& w) {
    std::size_t at = 0;
    for (Vec& row : w.theta)
        for (double& t : row) t = x[at++];
}

// Codebook block parameters: all K*D center coordinates followed by log(beta).
Vec pack_codebook(const Codebook& cb) {
    Vec x;
    x.reserve(static_cast<std::size_t>(cb.size()) * cb.dim() + 1);
    for (const Vec& c : cb.centers) x.insert(x.end(), c.begin(), c.end());
    x.push_back(std::log(cb.beta));
    return x;
}

void unpack_codebook(const Vec& x, Codebook& cb) {
    std::size_t at = 0;
    for (Vec& c : cb.centers)
        for (double& v : c) v = x[at++];
    cb.beta = std::exp(x[at]);
}

}  // namespace

double default_beta(const Dataset& data, const std::vector<Vec>& centers) {
    const std::vector<Vec> points = pooled_features(data);
    double msd = 0.0;
    for (const Vec& x : points) {
        double best = squared_distance(centers[0], x);
        for (std::size_t c = 1; c < centers.size(); ++c)
            best = std::min(best, squared_distance(centers[c], x));
        msd += best;
    }
    msd /= static_cast<double>(points.size());
    return 1.0 / (2.0 * std::max(msd, 1e-12));
}

Weights fit_theta(const std::vector<Vec>& encodings, const Dataset& data, Weights start,
                  const OptimizerConfig& cfg, Execution exec) {
    if (encodings.size() != data.size())
        throw std::invalid_argument("encodings do not match dataset size");
    const int c = start.classes();
    const int k = start.k();
    Weights probe = start;
    std::vector<Vec> d_theta(c, Vec(k, 0.0));
    std::vector<Vec> slots(std::min<std::size_t>(256, std::max<std::size_t>(data.size(), 1)),
                           Vec(c, 0.0));
    const ObjectiveFn f = [&](const Vec& x, Vec& grad) {
        unpack_theta(x, probe);
        const double value = objective_from_encodings(encodings, data, probe, exec);

        // row i = sum_n (label_i - sigma_i) z_n - 2 lambda theta_i
        for (Vec& row : d_theta) std::fill(row.begin(), row.end(), 0.0);
        blocked_map_fold(
            data.size(), exec, slots,
            [&](std::size_t n, Vec& residual) {
                const Vec sigma = class_posterior(encodings[n], probe);
                for (int i = 0; i < c; ++i) residual[i] = data.instances[n].label[i] - sigma[i];
            },
            [&](std::size_t n, const Vec& residual) {
                const Vec& z = encodings[n];
                for (int i = 0; i < c; ++i)
                    for (int j = 0; j < k; ++j) d_theta[i][j] += residual[i] * z[j];
            });
        std::size_t at = 0;
        for (int i = 0; i < c; ++i)
            for (int j = 0; j < k; ++j)
                grad[at++] = d_theta[i][j] - 2.0 * probe.lambda * probe.theta[i][j];
        return value;
    };

    const OptimResult res = quasi_newton_maximize(f, pack_theta(start), cfg);
    unpack_theta(res.x, start);
    return start;
}

Model optimize_theta_block(const Dataset& data, Model m, const OptimizerConfig& cfg,
                           Execution exec) {
    check_conformable(data, m);
    const std::vector<Vec> encodings = encode_dataset(data, m.codebook, Assign::Soft, exec);
    m.weights = fit_theta(encodings, data, std::move(m.weights), cfg, exec);
    return m;
}

Model optimize_codebook_block(const Dataset& data, Model m, const OptimizerConfig& cfg,
                              Execution exec) {
    check_conformable(data, m);
    Model probe = m;
    const ObjectiveFn f = [&](const Vec& x, Vec& grad) {
        unpack_codebook(x, probe.codebook);
        const double value = dataset_objective(data, probe, exec);
        const CodebookGrad g = grad_codebook(data, probe, exec);
        std::size_t at = 0;
        for (const Vec& row : g.d_centers)
            for (double v : row) grad[at++] = v;
        grad[at] = g.d_log_beta;
        return value;
    };

    const OptimResult res = quasi_newton_maximize(f, pack_codebook(m.codebook), cfg);
    unpack_codebook(res.x, m.codebook);
    return m;
}

std::pair<Model, TrainReport> coordinate_ascent_train(const Dataset& data, const TrainConfig& tc,
                                                      const OptimizerConfig& oc, Execution exec) {
    validate(data);
    if (tc.k < 1) throw std::invalid_argument("K must be >= 1");
    if (tc.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    if (tc.beta_init && !(*tc.beta_init > 0.0))
        throw std::invalid_argument("beta_init must be positive");

    const KmeansResult km = kmeans_init(data, tc.k, tc.seed, tc.kmeans_restarts, exec);

    Model m;
    m.codebook.centers = km.centers;
    m.codebook.beta = tc.beta_init ? *tc.beta_init : default_beta(data, km.centers);
    m.weights = zero_weights(data.classes, tc.k, tc.lambda);
    m.weights.beta_log_penalty = tc.beta_log_penalty;

    TrainReport report;
    report.kmeans_degenerate = km.degenerate;
    report.initial_objective = dataset_objective(data, m, exec);

    double round_start = report.initial_objective;
    for (int round = 0; round < tc.rounds; ++round) {
        m = optimize_theta_block(data, m, oc, exec);
        report.objective_trace.push_back(dataset_objective(data, m, exec));

        if (!tc.freeze_codebook) {
            m = optimize_codebook_block(data, m, oc, exec);
            report.objective_trace.push_back(dataset_objective(data, m, exec));
        }

        ++report.rounds_completed;
        const double round_end = report.objective_trace.back();
        if (round_end - round_start < 1e-7 * std::max(1.0, std::abs(round_end))) {
            report.converged = true;
            break;
        }
        round_start = round_end;
    }
    return {std::move(m), std::move(report)};
}

}  // namespace proto
