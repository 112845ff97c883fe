#pragma once

#include "proto/encoder.hpp"
#include "proto/gradients.hpp"
#include "proto/types.hpp"

// Plain single-threaded implementations of the dataset-level kernels, written
// as straight loops with no blocking or scratch reuse. They exist to pin down
// the parallel kernels in tests and in the benchmark; they are not used on any
// production path.
namespace proto::reference {

std::vector<Vec> encode_dataset(const Dataset& data, const Codebook& cb, Assign mode);

double dataset_objective(const Dataset& data, const Model& m);

/// Assembles center/beta gradients from the full encoding Jacobian per
/// instance (the tensor route), unlike the fused production kernel.
GradientBundle analytic_gradient(const Dataset& data, const Model& m);

}  // namespace proto::reference
