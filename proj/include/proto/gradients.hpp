#pragma once

#include "proto/classifier.hpp"
#include "proto/parallel.hpp"
#include "proto/types.hpp"

namespace proto {

struct GradientBundle {
    std::vector<Vec> d_centers;  // K x D
    double d_beta = 0.0;
    double d_log_beta = 0.0;  // beta * d_beta, for optimizers working in log space
    std::vector<Vec> d_theta;    // C x K, includes the regularizer term
};

/// dL/dz for one instance: sum_j (label_j - sigma_j) * theta_j.
Vec grad_wrt_encoding(const Vec& z, const Vec& label, const Weights& w);

/// Closed-form derivatives of one soft encoding wrt every center coordinate
/// and wrt beta. d_centers[k][l] is the D-vector dz_k/dmu_l.
struct EncodingJacobian {
    std::vector<std::vector<Vec>> d_centers;  // K x K x D
    Vec d_beta;                               // K
};
EncodingJacobian encoding_jacobian(const std::vector<Vec>& features, const Codebook& cb);

struct CodebookGrad {
    std::vector<Vec> d_centers;  // K x D
    double d_beta = 0.0;
    double d_log_beta = 0.0;
};

/// Gradient of the dataset objective wrt all centers and beta (Theta fixed).
CodebookGrad grad_codebook(const Dataset& data, const Model& m,
                           Execution exec = Execution::Parallel);

/// Gradient of the dataset objective wrt Theta over soft encodings:
/// row i = sum_n (label_i - sigma_i) z_n - 2 lambda theta_i.
std::vector<Vec> grad_theta(const Dataset& data, const Model& m,
                            Execution exec = Execution::Parallel);

/// All blocks assembled in one pass over the data.
GradientBundle analytic_gradient(const Dataset& data, const Model& m,
                                 Execution exec = Execution::Parallel);

/// Central finite differences of dataset_objective over every coordinate.
GradientBundle fd_gradient(const Dataset& data, const Model& m, double step,
                           Execution exec = Execution::Parallel);

struct FiniteDiffReport {
    double max_rel_centers = 0.0;
    double max_rel_beta = 0.0;
    double max_rel_theta = 0.0;
    double step = 0.0;

    double max_rel() const;
};

/// Per-block max of rel(a, b) = |a - b| / max(1, |a|, |b|).
FiniteDiffReport compare_gradients(const GradientBundle& a, const GradientBundle& b,
                                   double step);

FiniteDiffReport finite_diff_check(const Dataset& data, const Model& m, double step = 1e-5,
                                   Execution exec = Execution::Parallel);

}  // namespace proto
