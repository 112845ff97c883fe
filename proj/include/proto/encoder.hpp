#pragma once

#include "proto/parallel.hpp"
#include "proto/types.hpp"

namespace proto {

enum class Assign { Soft, Hard };

double squared_distance(const Vec& a, const Vec& b);

/// Softmax over -beta * squared distances to the centers, max-shifted so no
/// finite beta can overflow. Returns a K-vector on the simplex.
Vec soft_assign(const Vec& x, const Codebook& cb);

/// soft_assign into caller-owned buffers (assignments and the squared
/// distances); hot loops use this form to stay allocation-free.
void soft_assign_into(const Vec& x, const Codebook& cb, Vec& f, Vec& d2);

/// One-hot vector of the nearest center; ties go to the lowest index.
Vec hard_assign(const Vec& x, const Codebook& cb);

int nearest_center_index(const Vec& x, const Codebook& cb);

/// Mean-pooled assignment vector of a feature set: z_k = (1/M) sum_x f_k(x).
Vec encode_instance(const std::vector<Vec>& features, const Codebook& cb, Assign mode);

std::vector<Vec> encode_dataset(const Dataset& data, const Codebook& cb, Assign mode,
                                Execution exec = Execution::Parallel);

}  // namespace proto
