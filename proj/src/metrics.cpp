#include "proto/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "proto/classifier.hpp"

namespace proto {

namespace {

std::size_t argmax_lowest(const Vec& v) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < v.size(); ++j)
        if (v[j] > v[best]) best = j;
    return best;
}

}  // namespace

double kl_bits(const Vec& p, const Vec& q) {
    if (p.size() != q.size()) throw std::invalid_argument("dimension mismatch in KL");
    const double ln2 = std::log(2.0);
    double kl = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] == 0.0) continue;
        const double lq = std::max(std::log(q[j]), kLogFloor);
        kl += p[j] * (std::log(p[j]) - lq) / ln2;
    }
    return kl;
}

MetricsReport evaluate(const Dataset& data, const Model& m, Assign mode, Execution exec) {
    validate(data);
    check_conformable(data, m);

    struct Terms {
        double correct;
        double loglik;
        double kl;
    };
    MetricsReport rep;
    double correct = 0.0, loglik = 0.0, kl = 0.0;
    std::vector<Terms> slots(std::min<std::size_t>(256, data.size()));
    blocked_map_fold(
        data.size(), exec, slots,
        [&](std::size_t n, Terms& t) {
            const Instance& inst = data.instances[n];
            const Vec z = encode_instance(inst.features, m.codebook, mode);
            const Vec sigma = class_posterior(z, m.weights);
            t.correct = argmax_lowest(sigma) == argmax_lowest(inst.label) ? 1.0 : 0.0;
            t.loglik = instance_loglik(z, inst.label, m.weights);
            t.kl = kl_bits(inst.label, sigma);
        },
        [&](std::size_t, const Terms& t) {
            correct += t.correct;
            loglik += t.loglik;
            kl += t.kl;
        });

    const double n = static_cast<double>(data.size());
    rep.accuracy = correct / n;
    rep.mean_test_loglik = loglik / n;
    rep.mean_kl_bits = kl / n;
    return rep;
}

}  // namespace proto
