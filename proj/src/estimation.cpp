#include "bulkjl/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "bulkjl/errors.hpp"
#include "bulkjl/kernels.hpp"

namespace bulkjl::estimation {

namespace {

// ||Sigma_hat_m|| needs only modest accuracy: the estimator's sandwich
// carries factor-5/3 slack by construction. Empirical covariance spectra
// bunch up at the edge, where the power iteration's residual certificate
// can exceed its iteration cap while the value itself has long converged;
// the best estimate is good enough here.
constexpr double kEigTol = 1e-6;

double top_eig_best_effort(const DenseMatrix& sigma) {
    try {
        return top_eigenvalue(sigma, kEigTol);
    } catch (const numeric_error& e) {
        return e.best_estimate();
    }
}

}  // namespace

EmpiricalSecondMoment empirical_sigma(const DenseMatrix& unit_columns) {
    if (unit_columns.empty()) throw input_error("empirical_sigma: empty input");
    const std::size_t d = unit_columns.rows();
    const std::size_t m = unit_columns.cols();

    for (std::size_t c = 0; c < m; ++c) {
        double norm_sq = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            const double v = unit_columns(r, c);
            norm_sq += v * v;
        }
        if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-9) {
            throw input_error("empirical_sigma: column " + std::to_string(c) +
                              " is not unit-norm (|norm-1| = " +
                              std::to_string(std::abs(std::sqrt(norm_sq) - 1.0)) + ")");
        }
    }

    // Rows of U are contiguous, so S_ij = dot(row_i, row_j) / m over the
    // upper triangle, mirrored for exact symmetry.
    EmpiricalSecondMoment out;
    out.m = m;
    out.matrix = DenseMatrix(d, d);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            const double s = kernels::dot(unit_columns.row(i), unit_columns.row(j), m) * inv_m;
            out.matrix(i, j) = s;
            out.matrix(j, i) = s;
        }
    }
    out.top_eig = top_eig_best_effort(out.matrix);
    // Cauchy-Schwarz forces ||Sigma_hat|| <= 1 for unit inputs, and the
    // trace pins it above 1/D; escaping either band means corrupted input
    // or arithmetic.
    if (out.top_eig > 1.0 + 1e-6 || out.top_eig < 1.0 / static_cast<double>(d) - 1e-6) {
        throw numeric_error("empirical_sigma: top eigenvalue outside [1/D, 1]", out.top_eig);
    }
    return out;
}

std::size_t rhat_sample_size(std::size_t d, double delta) {
    return static_cast<std::size_t>(
        std::ceil(8.0 * static_cast<double>(d) * std::log(2.0 * static_cast<double>(d) / delta)));
}

RhatEstimate estimate_rhat(const Dataset& data, double delta) {
    data.validate();
    if (!(delta > 0.0 && delta < 1.0)) throw input_error("estimate_rhat: delta must be in (0,1)");
    const std::size_t d = data.d;
    const std::size_t m = rhat_sample_size(d, delta);
    if (m > (data.n - 1) / 2) {
        throw input_error("estimate_rhat: need m = " + std::to_string(m) +
                          " disjoint pairs, i.e. N >= " + std::to_string(2 * m + 1) + ", have N = " +
                          std::to_string(data.n));
    }

    // Sequentially pair off points (0,1), (2,3), ...; duplicates yield zero
    // difference vectors, which are dropped and replaced from unused pairs.
    DenseMatrix unit_cols(d, m);
    RhatEstimate out;
    std::size_t filled = 0;
    std::size_t pair = 0;
    const std::size_t max_pairs = data.n / 2;
    while (filled < m && pair < max_pairs) {
        const double* a = data.points.data() + (2 * pair) * d;
        const double* b = data.points.data() + (2 * pair + 1) * d;
        ++pair;
        const double norm_sq = kernels::sqdist(a, b, d);
        if (norm_sq == 0.0) {
            ++out.zero_pairs_dropped;
            continue;
        }
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (std::size_t r = 0; r < d; ++r) unit_cols(r, filled) = (a[r] - b[r]) * inv;
        ++filled;
    }
    if (filled < m) {
        throw input_error("estimate_rhat: only " + std::to_string(filled) + " of " +
                          std::to_string(m) + " nonzero difference pairs available after dropping " +
                          std::to_string(out.zero_pairs_dropped) + " duplicates");
    }

    const EmpiricalSecondMoment sigma = empirical_sigma(unit_cols);
    out.m_used = m;
    out.sigma_m_norm = sigma.top_eig;
    out.rhat_lower = 1.0 / (3.0 * sigma.top_eig);
    return out;
}

double small_ball_estimate(const Dataset& samples, double eps) {
    samples.validate();
    if (eps <= 0.0) throw input_error("small_ball_estimate: eps must be positive");
    const std::size_t n = samples.n;
    std::vector<double> norms_sq(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        norms_sq[i] = kernels::sum_sq(samples.points.data() + i * samples.d, samples.d);
        mean += norms_sq[i];
    }
    mean /= static_cast<double>(n);
    std::size_t below = 0;
    const double threshold = eps * mean;
    for (double v : norms_sq) {
        if (v < threshold) ++below;
    }
    return static_cast<double>(below) / static_cast<double>(n);
}

std::vector<std::vector<double>> subgraph_deviation_orderstats(const batching::BatchPlan& plan,
                                                               const Dataset& data,
                                                               const DenseMatrix& sigma_ref) {
    if (sigma_ref.rows() != data.d || sigma_ref.cols() != data.d) {
        throw input_error("subgraph_deviation_orderstats: sigma_ref must be D x D");
    }
    std::vector<std::vector<double>> per_subgraph(plan.batches_per_subgraph.size());
    for (const auto& batch : plan.batches) {
        const DenseMatrix unit = batch.unit_matrix(data);
        const EmpiricalSecondMoment sigma_m = empirical_sigma(unit);
        DenseMatrix diff = sigma_m.matrix;
        for (std::size_t i = 0; i < diff.rows() * diff.cols(); ++i) {
            diff.data()[i] -= sigma_ref.data()[i];
        }
        per_subgraph[batch.subgraph_id].push_back(operator_norm_symmetric(diff, kEigTol));
    }
    for (auto& devs : per_subgraph) std::sort(devs.begin(), devs.end());
    return per_subgraph;
}

}  // namespace bulkjl::estimation
