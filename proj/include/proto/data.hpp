#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "proto/types.hpp"

namespace proto {

// Dataset files are line-delimited JSON: a {"D":..,"C":..} header line, then
// one {"id":..,"features":[[..]],"label":[..]} object per instance.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

// Model files are a single JSON object {"K","D","C","centers","beta","theta","lambda"}.
Model load_model(const std::filesystem::path& path);
void save_model(const Model& m, const std::filesystem::path& path);

struct SyntheticConfig {
    int instances_per_class = 10;  // total instance count is C * instances_per_class
    int m_min = 1;
    int m_max = 20;
    std::vector<Vec> class_means;               // C rows of D
    std::vector<std::vector<Vec>> covariances;  // C matrices, D x D symmetric positive-definite
    std::uint64_t seed = 0;
};

/// The canonical two-class 2-D preset: 20 instances, M in {1..20}, one
/// isotropic class and one correlated class (off-diagonal 0.95).
SyntheticConfig figure1_config(std::uint64_t seed);

/// Mixture-of-Gaussians generator: each instance draws a class uniformly,
/// an M from [m_min, m_max], and M vectors from that class's Gaussian.
/// Labels are hard one-hots. Pure function of the seed.
Dataset generate_figure1_toy(const SyntheticConfig& cfg);

/// Mixes every label with the uniform distribution: (1-alpha) label + alpha/C.
Dataset smooth_labels(Dataset data, double alpha);

struct RecordTable {
    std::vector<std::vector<int>> attributes;  // one discrete tuple per row
    std::vector<int> class_values;             // in 1..class_count
    int class_count = 0;
};

/// One instance per distinct attribute tuple: features are the tuple's integer
/// codes (one identical vector per row in the group), the label is the class
/// frequency vector within the group.
Dataset group_records_to_soft_labels(const RecordTable& table);

struct SplitResult {
    Dataset train;
    Dataset test;
    int singleton_strata = 0;  // strata of size < 2, assigned wholly to train
};

/// Stratifies by argmax of the soft label; per-stratum train counts are
/// rounded with the global count preserved (largest-remainder). Seeded shuffle
/// within strata; the two sides partition the input.
SplitResult stratified_split(const Dataset& data, double fraction, std::uint64_t seed);

}  // namespace proto
