#pragma once

#include "proto/train.hpp"
#include "proto/types.hpp"

namespace proto {

/// The standard prototype pipeline: k-means centers, frozen; hard encodings;
/// Theta fit by the Theta block. soft_encoding switches the frozen-center
/// encodings to soft mode (ablation variant).
Model train_standard_prototype(const Dataset& data, const TrainConfig& tc,
                               const OptimizerConfig& oc, bool soft_encoding = false,
                               Execution exec = Execution::Parallel);

struct LvqStepConfig {
    double eta = 0.1;
};

/// One literal LVQ-style update of center `ell`:
///   mu <- mu + eta * sum_x (theta_ell[y] - sum_j theta_ell[j] sigma_j) (mu - x)
/// with sigma taken at the instance's current soft encoding. The label must be
/// one-hot. Note the sign: a positive coefficient moves the center away from x.
Vec lvq_update(const Model& m, const std::vector<Vec>& features, const Vec& hard_label,
               int ell, const LvqStepConfig& cfg);

/// One relaxed update of every center from a single hard-labeled instance,
/// with both the cross-prototype term and the own-prototype term:
///   mu_ell <- mu_ell + eta * [ sum_x sum_{k != ell} r_k f_k f_ell (mu_ell - x)
///                             + sum_x r_ell f_ell (mu_ell - x) ]
/// where r_k = theta_k[y] - sum_j theta_k[j] sigma_j. In the hard-assignment
/// limit the update on the winning center collapses to lvq_update and every
/// other center stays put.
std::vector<Vec> relaxed_lvq_gradient_step(const Model& m, const Instance& inst, double eta);

}  // namespace proto
