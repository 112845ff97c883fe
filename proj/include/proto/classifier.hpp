#pragma once

#include "proto/encoder.hpp"
#include "proto/parallel.hpp"
#include "proto/types.hpp"

namespace proto {

// Log-probabilities below this are clamped inside likelihood sums so the
// objective stays finite and optimizable. Raw posteriors are never clamped.
inline constexpr double kLogFloor = -700.0;

/// Softmax posterior over classes for one encoding, max-shifted.
Vec class_posterior(const Vec& z, const Weights& w);

/// Log of class_posterior computed directly in the log domain (no floor).
Vec log_posterior(const Vec& z, const Weights& w);

/// Soft-label log-likelihood of one instance: sum_j label_j * log sigma_j,
/// with each log clamped at kLogFloor.
double instance_loglik(const Vec& z, const Vec& label, const Weights& w);

/// Sum of per-instance log-likelihoods over soft encodings, minus
/// lambda * tr(Theta^T Theta), minus the optional penalty on log(beta).
/// Instances are reduced in index order regardless of execution mode.
double dataset_objective(const Dataset& data, const Model& m,
                         Execution exec = Execution::Parallel);

/// Same objective over precomputed encodings (the Theta-block view).
double objective_from_encodings(const std::vector<Vec>& encodings, const Dataset& data,
                                const Weights& w, Execution exec = Execution::Parallel);

}  // namespace proto
