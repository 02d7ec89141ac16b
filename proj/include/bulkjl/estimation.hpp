#pragma once

#include <cstddef>
#include <vector>

#include "bulkjl/batching.hpp"
#include "bulkjl/dataset.hpp"
#include "bulkjl/matrix.hpp"

namespace bulkjl::estimation {

/// Empirical second moment (1/m) sum y_i y_i^T of unit column vectors.
/// Trace is 1 up to rounding and the top eigenvalue lies in [1/D, 1].
struct EmpiricalSecondMoment {
    DenseMatrix matrix;  // D x D, symmetric PSD
    std::size_t m = 0;
    double top_eig = 0.0;
};

/// Columns must be unit-norm within 1e-9. Accumulation runs over the upper
/// triangle and mirrors, so the result is exactly symmetric.
EmpiricalSecondMoment empirical_sigma(const DenseMatrix& unit_columns);

struct RhatEstimate {
    double rhat_lower = 0.0;   // 1 / (3 ||Sigma_hat_m||)
    std::size_t m_used = 0;    // number of unit difference vectors
    std::size_t zero_pairs_dropped = 0;
    double sigma_m_norm = 0.0;
};

/// Intrinsic-dimension estimate for the unit difference vector, from
/// m = ceil(8 D log(2D/delta)) disjoint sequential pairs of data points.
/// Zero difference vectors (duplicate points) are dropped and replaced
/// from unused pairs; requires m <= (N-1)/2 after drops.
RhatEstimate estimate_rhat(const Dataset& data, double delta);

/// The m the corollary requires for a given D and delta.
std::size_t rhat_sample_size(std::size_t d, double delta);

/// Empirical frequency of ||y||^2 < eps * mean(||y||^2) over dataset rows.
double small_ball_estimate(const Dataset& samples, double eps);

/// For each subgraph of the plan, the sorted deviations
/// ||Sigma_hat_M(batch) - sigma_ref|| across its batches.
std::vector<std::vector<double>> subgraph_deviation_orderstats(const batching::BatchPlan& plan,
                                                               const Dataset& data,
                                                               const DenseMatrix& sigma_ref);

}  // namespace bulkjl::estimation
