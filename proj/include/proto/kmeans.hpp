#pragma once

#include <cstdint>

#include "proto/parallel.hpp"
#include "proto/types.hpp"

namespace proto {

struct KmeansResult {
    std::vector<Vec> centers;
    double wcss = 0.0;       // within-cluster sum of squared distances
    bool degenerate = false; // fewer distinct points than K; centers padded by duplication
};

/// Lloyd's algorithm with greedy farthest-point seeding from a seeded start.
/// Empty clusters are reseeded to the point farthest from its own center.
/// Best of `restarts` runs by WCSS.
KmeansResult kmeans(const std::vector<Vec>& points, int k, std::uint64_t seed, int restarts,
                    Execution exec = Execution::Parallel);

/// The pooled multiset of all feature vectors from all instances.
std::vector<Vec> pooled_features(const Dataset& data);

/// kmeans over the pooled feature vectors of the dataset.
KmeansResult kmeans_init(const Dataset& data, int k, std::uint64_t seed, int restarts,
                         Execution exec = Execution::Parallel);

}  // namespace proto
