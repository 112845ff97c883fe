#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "proto/kmeans.hpp"
#include "proto/lbfgs.hpp"
#include "proto/parallel.hpp"
#include "proto/types.hpp"

namespace proto {

struct TrainConfig {
    int k = 2;
    double lambda = 0.0;
    int rounds = 20;
    std::uint64_t seed = 0;
    // Unset: 1 / (2 * mean squared distance of feature vectors to their k-means centers).
    std::optional<double> beta_init;
    int kmeans_restarts = 4;
    double beta_log_penalty = 0.0;
    // Skip the codebook block entirely (centers and beta stay at their
    // initialization); with rounds = 1 this reduces the trainer to the
    // frozen-center baseline.
    bool freeze_codebook = false;
};

struct TrainReport {
    double initial_objective = 0.0;       // at k-means centers, beta_init, Theta = 0
    std::vector<double> objective_trace;  // after every block optimization
    int rounds_completed = 0;
    bool converged = false;               // stopped early on a small full-round improvement
    bool kmeans_degenerate = false;
};

/// The Theta subproblem: maximizes the regularized objective over Theta with
/// the encodings fixed. Concave, so the optimum is start-independent.
Weights fit_theta(const std::vector<Vec>& encodings, const Dataset& data, Weights start,
                  const OptimizerConfig& cfg, Execution exec = Execution::Parallel);

/// Maximizes the objective over Theta with encodings computed once and cached.
Model optimize_theta_block(const Dataset& data, Model m, const OptimizerConfig& cfg,
                           Execution exec = Execution::Parallel);

/// Maximizes the objective jointly over all center coordinates and log(beta)
/// with Theta fixed; beta stays positive by construction.
Model optimize_codebook_block(const Dataset& data, Model m, const OptimizerConfig& cfg,
                              Execution exec = Execution::Parallel);

/// k-means init, Theta = 0, then alternating Theta / codebook maximization.
/// Stops early when a full round improves the objective by less than
/// 1e-7 * max(1, |objective|). Deterministic for a given seed.
std::pair<Model, TrainReport> coordinate_ascent_train(const Dataset& data, const TrainConfig& tc,
                                                      const OptimizerConfig& oc,
                                                      Execution exec = Execution::Parallel);

/// The beta_init heuristic: places initial assignments in a responsive regime.
double default_beta(const Dataset& data, const std::vector<Vec>& centers);

}  // namespace proto
