#include "proto/encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace proto {

namespace {

void check_dims(const Vec& x, const Codebook& cb) {
    if (cb.size() < 1) throw std::invalid_argument("codebook has no centers");
    if (static_cast<int>(x.size()) != cb.dim())
        throw std::invalid_argument("dimension mismatch: feature vs codebook");
    if (!all_finite(x)) throw std::invalid_argument("non-finite feature vector");
}

}  // namespace

double squared_distance(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

void soft_assign_into(const Vec& x, const Codebook& cb, Vec& f, Vec& d2) {
    check_dims(x, cb);
    if (!(cb.beta > 0.0)) throw std::invalid_argument("beta must be positive");
    const int k = cb.size();
    f.resize(k);
    d2.resize(k);
    double top = -HUGE_VAL;
    for (int i = 0; i < k; ++i) {
        d2[i] = squared_distance(cb.centers[i], x);
        const double score = -cb.beta * d2[i];
        f[i] = score;
        if (score > top) top = score;
    }
    double norm = 0.0;
    for (int i = 0; i < k; ++i) {
        f[i] = std::exp(f[i] - top);
        norm += f[i];
    }
    for (int i = 0; i < k; ++i) f[i] /= norm;
}

Vec soft_assign(const Vec& x, const Codebook& cb) {
    Vec f, d2;
    soft_assign_into(x, cb, f, d2);
    return f;
}

int nearest_center_index(const Vec& x, const Codebook& cb) {
    check_dims(x, cb);
    const int k = cb.size();
    int best = 0;
    double best_d = squared_distance(cb.centers[0], x);
    for (int i = 1; i < k; ++i) {
        const double d = squared_distance(cb.centers[i], x);
        if (d < best_d) {  // ties keep the lowest index
            best_d = d;
            best = i;
        }
    }
    return best;
}

Vec hard_assign(const Vec& x, const Codebook& cb) {
    Vec f(cb.size(), 0.0);
    f[nearest_center_index(x, cb)] = 1.0;
    return f;
}

Vec encode_instance(const std::vector<Vec>& features, const Codebook& cb, Assign mode) {
    if (features.empty()) throw std::invalid_argument("empty feature set");
    const int k = cb.size();
    Vec z(k, 0.0);
    if (mode == Assign::Soft) {
        Vec f, d2;
        for (const Vec& x : features) {
            soft_assign_into(x, cb, f, d2);
            for (int i = 0; i < k; ++i) z[i] += f[i];
        }
    } else {
        for (const Vec& x : features) z[nearest_center_index(x, cb)] += 1.0;
    }
    const double pool = 1.0 / static_cast<double>(features.size());
    for (int i = 0; i < k; ++i) z[i] *= pool;
    return z;
}

std::vector<Vec> encode_dataset(const Dataset& data, const Codebook& cb, Assign mode,
                                Execution exec) {
    std::vector<Vec> out(data.size());
    parallel_for(data.size(), exec,
                 [&](std::size_t n) { out[n] = encode_instance(data.instances[n].features, cb, mode); });
    return out;
}

}  // namespace proto
