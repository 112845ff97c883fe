#pragma once

#include "proto/encoder.hpp"
#include "proto/parallel.hpp"
#include "proto/types.hpp"

namespace proto {

struct MetricsReport {
    double accuracy = 0.0;         // argmax posterior vs argmax label, ties to lowest index
    double mean_test_loglik = 0.0; // mean instance_loglik
    double mean_kl_bits = 0.0;     // mean KL(label || posterior) in bits
};

/// KL(p || q) in bits; terms with p_j = 0 contribute zero, q is floored inside
/// the log so the result stays finite.
double kl_bits(const Vec& p, const Vec& q);

MetricsReport evaluate(const Dataset& data, const Model& m, Assign mode = Assign::Soft,
                       Execution exec = Execution::Parallel);

}  // namespace proto
