#include "proto/reference.hpp"

#include <cmath>

#include "proto/classifier.hpp"

namespace proto::reference {

std::vector<Vec> encode_dataset(const Dataset& data, const Codebook& cb, Assign mode) {
    std::vector<Vec> out;
    out.reserve(data.size());
    for (const Instance& inst : data.instances)
        out.push_back(encode_instance(inst.features, cb, mode));
    return out;
}

double dataset_objective(const Dataset& data, const Model& m) {
    double sum = 0.0;
    for (const Instance& inst : data.instances) {
        const Vec z = encode_instance(inst.features, m.codebook, Assign::Soft);
        sum += instance_loglik(z, inst.label, m.weights);
    }
    double fro = 0.0;
    for (const Vec& row : m.weights.theta)
        for (double t : row) fro += t * t;
    double penalty = 0.0;
    if (m.weights.beta_log_penalty != 0.0) {
        const double lb = std::log(m.codebook.beta);
        penalty = m.weights.beta_log_penalty * lb * lb;
    }
    return sum - m.weights.lambda * fro - penalty;
}

GradientBundle analytic_gradient(const Dataset& data, const Model& m) {
    const int k = m.codebook.size();
    const int d = m.codebook.dim();
    const int c = m.weights.classes();

    GradientBundle out;
    out.d_centers.assign(k, Vec(d, 0.0));
    out.d_theta.assign(c, Vec(k, 0.0));

    for (const Instance& inst : data.instances) {
        const Vec z = encode_instance(inst.features, m.codebook, Assign::Soft);
        const Vec sigma = class_posterior(z, m.weights);
        const Vec g = grad_wrt_encoding(z, inst.label, m.weights);
        const EncodingJacobian jac = encoding_jacobian(inst.features, m.codebook);

        // Chain rule through the full Jacobian tensor.
        for (int l = 0; l < k; ++l)
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < d; ++j)
                    out.d_centers[l][j] += g[i] * jac.d_centers[i][l][j];
        for (int i = 0; i < k; ++i) out.d_beta += g[i] * jac.d_beta[i];

        for (int i = 0; i < c; ++i) {
            const double r = inst.label[i] - sigma[i];
            for (int j = 0; j < k; ++j) out.d_theta[i][j] += r * z[j];
        }
    }

    for (int i = 0; i < c; ++i)
        for (int j = 0; j < k; ++j)
            out.d_theta[i][j] -= 2.0 * m.weights.lambda * m.weights.theta[i][j];
    if (m.weights.beta_log_penalty != 0.0)
        out.d_beta -= 2.0 * m.weights.beta_log_penalty * std::log(m.codebook.beta) / m.codebook.beta;
    out.d_log_beta = m.codebook.beta * out.d_beta;
    return out;
}

}  // namespace proto::reference
