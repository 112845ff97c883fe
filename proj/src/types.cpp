#include "proto/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace proto {

bool all_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

Weights zero_weights(int classes, int k, double lambda) {
    Weights w;
    w.theta.assign(classes, Vec(k, 0.0));
    w.lambda = lambda;
    return w;
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

void validate(const Dataset& data) {
    if (data.dim < 1) fail("dataset: D must be >= 1");
    if (data.classes < 2) fail("dataset: C must be >= 2");
    if (data.instances.empty()) fail("dataset: no instances");
    for (std::size_t n = 0; n < data.instances.size(); ++n) {
        const Instance& inst = data.instances[n];
        const std::string where = "instance " + std::to_string(n) + " (" + inst.id + "): ";
        if (inst.features.empty()) fail(where + "empty feature set");
        for (const Vec& x : inst.features) {
            if (static_cast<int>(x.size()) != data.dim) fail(where + "feature row of wrong length");
            if (!all_finite(x)) fail(where + "non-finite feature value");
        }
        if (static_cast<int>(inst.label.size()) != data.classes)
            fail(where + "label of wrong length");
        double sum = 0.0;
        for (double p : inst.label) {
            if (!(p >= 0.0 && p <= 1.0)) fail(where + "label entry outside [0,1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) fail(where + "label not a distribution");
    }
}

void validate(const Model& m) {
    const int k = m.codebook.size();
    const int d = m.codebook.dim();
    if (k < 1) fail("model: K must be >= 1");
    if (!(m.codebook.beta > 0.0) || !std::isfinite(m.codebook.beta))
        fail("model: beta must be positive and finite");
    for (const Vec& c : m.codebook.centers) {
        if (static_cast<int>(c.size()) != d) fail("model: ragged centers");
        if (!all_finite(c)) fail("model: non-finite center");
    }
    if (m.weights.classes() < 2) fail("model: C must be >= 2");
    if (m.weights.k() != k) fail("model: theta width does not match K");
    for (const Vec& row : m.weights.theta) {
        if (static_cast<int>(row.size()) != k) fail("model: ragged theta");
        if (!all_finite(row)) fail("model: non-finite theta");
    }
    if (m.weights.lambda < 0.0) fail("model: lambda must be >= 0");
}

void check_conformable(const Dataset& data, const Model& m) {
    if (m.codebook.dim() != data.dim) fail("dimension mismatch: model D vs dataset D");
    if (m.weights.classes() != data.classes) fail("dimension mismatch: model C vs dataset C");
}

}  // namespace proto
