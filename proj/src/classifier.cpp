#include "proto/classifier.hpp"

#include <cmath>
#include <stdexcept>

namespace proto {

namespace {

constexpr std::size_t kReduceBlock = 256;

Vec scores(const Vec& z, const Weights& w) {
    if (static_cast<int>(z.size()) != w.k())
        throw std::invalid_argument("dimension mismatch: encoding vs theta");
    const int c = w.classes();
    Vec s(c, 0.0);
    for (int i = 0; i < c; ++i) {
        const Vec& row = w.theta[i];
        double dot = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) dot += row[j] * z[j];
        s[i] = dot;
    }
    return s;
}

double theta_frobenius(const Weights& w) {
    double s = 0.0;
    for (const Vec& row : w.theta)
        for (double t : row) s += t * t;
    return s;
}

double log_beta_penalty(const Weights& w, double beta) {
    if (w.beta_log_penalty == 0.0) return 0.0;
    const double lb = std::log(beta);
    return w.beta_log_penalty * lb * lb;
}

}  // namespace

Vec class_posterior(const Vec& z, const Weights& w) {
    Vec s = scores(z, w);
    double top = s[0];
    for (double v : s) top = std::max(top, v);
    double norm = 0.0;
    for (double& v : s) {
        v = std::exp(v - top);
        norm += v;
    }
    for (double& v : s) v /= norm;
    return s;
}

Vec log_posterior(const Vec& z, const Weights& w) {
    Vec s = scores(z, w);
    double top = s[0];
    for (double v : s) top = std::max(top, v);
    double norm = 0.0;
    for (double v : s) norm += std::exp(v - top);
    const double log_norm = top + std::log(norm);
    for (double& v : s) v -= log_norm;
    return s;
}

double instance_loglik(const Vec& z, const Vec& label, const Weights& w) {
    if (static_cast<int>(label.size()) != w.classes())
        throw std::invalid_argument("dimension mismatch: label vs theta");
    const Vec lp = log_posterior(z, w);
    double ll = 0.0;
    for (std::size_t j = 0; j < label.size(); ++j) {
        if (label[j] == 0.0) continue;
        ll += label[j] * std::max(lp[j], kLogFloor);
    }
    return ll;
}

double objective_from_encodings(const std::vector<Vec>& encodings, const Dataset& data,
                                const Weights& w, Execution exec) {
    double sum = 0.0;
    std::vector<double> slots(std::min(kReduceBlock, std::max<std::size_t>(encodings.size(), 1)));
    blocked_map_fold(
        encodings.size(), exec, slots,
        [&](std::size_t n, double& out) {
            out = instance_loglik(encodings[n], data.instances[n].label, w);
        },
        [&](std::size_t, double v) { sum += v; });
    return sum - w.lambda * theta_frobenius(w);
}

double dataset_objective(const Dataset& data, const Model& m, Execution exec) {
    check_conformable(data, m);
    double sum = 0.0;
    std::vector<double> slots(std::min(kReduceBlock, std::max<std::size_t>(data.size(), 1)));
    blocked_map_fold(
        data.size(), exec, slots,
        [&](std::size_t n, double& out) {
            const Instance& inst = data.instances[n];
            const Vec z = encode_instance(inst.features, m.codebook, Assign::Soft);
            out = instance_loglik(z, inst.label, m.weights);
        },
        [&](std::size_t, double v) { sum += v; });
    return sum - m.weights.lambda * theta_frobenius(m.weights) -
           log_beta_penalty(m.weights, m.codebook.beta);
}

}  // namespace proto
