#include "proto/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "proto/classifier.hpp"
#include "proto/encoder.hpp"

namespace proto {

namespace {

int hard_label_index(const Vec& label) {
    int idx = -1;
    for (std::size_t j = 0; j < label.size(); ++j) {
        if (label[j] == 1.0) {
            if (idx >= 0) return -1;
            idx = static_cast<int>(j);
        } else if (label[j] != 0.0) {
            return -1;
        }
    }
    return idx;
}

}  // namespace

Model train_standard_prototype(const Dataset& data, const TrainConfig& tc,
                               const OptimizerConfig& oc, bool soft_encoding, Execution exec) {
    validate(data);
    if (tc.k < 1) throw std::invalid_argument("K must be >= 1");

    const KmeansResult km = kmeans_init(data, tc.k, tc.seed, tc.kmeans_restarts, exec);

    Model m;
    m.codebook.centers = km.centers;
    m.codebook.beta = tc.beta_init ? *tc.beta_init : default_beta(data, km.centers);
    m.weights = zero_weights(data.classes, tc.k, tc.lambda);

    const Assign mode = soft_encoding ? Assign::Soft : Assign::Hard;
    const std::vector<Vec> encodings = encode_dataset(data, m.codebook, mode, exec);
    m.weights = fit_theta(encodings, data, std::move(m.weights), oc, exec);
    return m;
}

Vec lvq_update(const Model& m, const std::vector<Vec>& features, const Vec& hard_label, int ell,
               const LvqStepConfig& cfg) {
    if (!(cfg.eta > 0.0) && cfg.eta != 0.0) throw std::invalid_argument("eta must be >= 0");
    if (ell < 0 || ell >= m.codebook.size()) throw std::invalid_argument("center index out of range");
    const int y = hard_label_index(hard_label);
    if (y < 0) throw std::invalid_argument("lvq_update requires a one-hot label");

    const Vec z = encode_instance(features, m.codebook, Assign::Soft);
    const Vec sigma = class_posterior(z, m.weights);

    double avg = 0.0;  // posterior-weighted average of theta_ell over classes
    for (int j = 0; j < m.weights.classes(); ++j) avg += m.weights.theta[j][ell] * sigma[j];
    const double coef = m.weights.theta[y][ell] - avg;

    Vec mu = m.codebook.centers[ell];
    for (const Vec& x : features)
        for (std::size_t d = 0; d < mu.size(); ++d)
            mu[d] += cfg.eta * coef * (m.codebook.centers[ell][d] - x[d]);
    return mu;
}

std::vector<Vec> relaxed_lvq_gradient_step(const Model& m, const Instance& inst, double eta) {
    const int y = hard_label_index(inst.label);
    if (y < 0) throw std::invalid_argument("relaxed LVQ step requires a one-hot label");
    const int k = m.codebook.size();
    const int c = m.weights.classes();
    const int dim = m.codebook.dim();

    const Vec z = encode_instance(inst.features, m.codebook, Assign::Soft);
    const Vec sigma = class_posterior(z, m.weights);

    // r_k = theta_k[y] - sum_j theta_k[j] sigma_j, one per prototype.
    Vec r(k, 0.0);
    for (int i = 0; i < k; ++i) {
        double avg = 0.0;
        for (int j = 0; j < c; ++j) avg += m.weights.theta[j][i] * sigma[j];
        r[i] = m.weights.theta[y][i] - avg;
    }

    std::vector<Vec> centers = m.codebook.centers;
    for (const Vec& x : inst.features) {
        const Vec f = soft_assign(x, m.codebook);
        for (int l = 0; l < k; ++l) {
            double cross = 0.0;
            for (int i = 0; i < k; ++i)
                if (i != l) cross += r[i] * f[i];
            const double coef = eta * f[l] * (cross + r[l]);
            const Vec& mu = m.codebook.centers[l];
            for (int d = 0; d < dim; ++d) centers[l][d] += coef * (mu[d] - x[d]);
        }
    }
    return centers;
}

}  // namespace proto
