#pragma once

#include <string>

#include "proto/rng.hpp"
#include "proto/types.hpp"

namespace testutil {

inline proto::Vec random_simplex(proto::Rng& rng, int c) {
    proto::Vec label(c);
    double sum = 0.0;
    for (double& p : label) {
        p = rng.uniform(0.01, 1.0);
        sum += p;
    }
    for (double& p : label) p /= sum;
    return label;
}

inline proto::Dataset random_dataset(proto::Rng& rng, int n, int m_max, int d, int c,
                                     bool hard_labels = false) {
    proto::Dataset data;
    data.dim = d;
    data.classes = c;
    for (int i = 0; i < n; ++i) {
        proto::Instance inst;
        inst.id = "t" + std::to_string(i);
        const int m = static_cast<int>(rng.uniform_int(1, m_max));
        for (int v = 0; v < m; ++v) {
            proto::Vec x(d);
            for (double& e : x) e = 2.0 * rng.normal();
            inst.features.push_back(std::move(x));
        }
        if (hard_labels) {
            inst.label.assign(c, 0.0);
            inst.label[rng.uniform_int(0, c - 1)] = 1.0;
        } else {
            inst.label = random_simplex(rng, c);
        }
        data.instances.push_back(std::move(inst));
    }
    return data;
}

inline proto::Model random_model(proto::Rng& rng, int k, int d, int c, double lambda) {
    proto::Model m;
    m.codebook.centers.assign(k, proto::Vec(d));
    for (proto::Vec& mu : m.codebook.centers)
        for (double& e : mu) e = rng.normal();
    m.codebook.beta = rng.uniform(0.3, 2.0);
    m.weights = proto::zero_weights(c, k, lambda);
    for (proto::Vec& row : m.weights.theta)
        for (double& t : row) t = rng.normal();
    return m;
}

}  // namespace testutil
