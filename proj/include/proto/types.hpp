#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace proto {

using Vec = std::vector<double>;

/// One datapoint: a set of feature vectors plus a soft label over classes.
struct Instance {
    std::string id;
    std::vector<Vec> features;  // M_n rows, each of length D
    Vec label;                  // length C, on the probability simplex
};

struct Dataset {
    int dim = 0;      // D
    int classes = 0;  // C
    std::vector<Instance> instances;

    std::size_t size() const { return instances.size(); }
};

/// K prototype centers plus the rate parameter (inverse temperature).
struct Codebook {
    std::vector<Vec> centers;  // K rows, each of length D
    double beta = 1.0;

    int size() const { return static_cast<int>(centers.size()); }
    int dim() const { return centers.empty() ? 0 : static_cast<int>(centers.front().size()); }
};

/// Softmax classifier parameters: one K-vector per class.
struct Weights {
    std::vector<Vec> theta;  // C rows, each of length K
    double lambda = 0.0;
    // Strength of the optional Gaussian penalty on log(beta); 0 disables it.
    // Runtime-only knob, never serialized.
    double beta_log_penalty = 0.0;

    int classes() const { return static_cast<int>(theta.size()); }
    int k() const { return theta.empty() ? 0 : static_cast<int>(theta.front().size()); }
};

struct Model {
    Codebook codebook;
    Weights weights;
};

Weights zero_weights(int classes, int k, double lambda);

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const Dataset& data);
void validate(const Model& m);
void check_conformable(const Dataset& data, const Model& m);

bool all_finite(const Vec& v);

}  // namespace proto
