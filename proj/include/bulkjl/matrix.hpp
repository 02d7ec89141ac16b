#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bulkjl {

/// Dense row-major matrix of doubles. Values are immutable in spirit: the
/// library treats constructed matrices as read-only inputs, so sharing
/// across threads is safe.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    const double* data() const noexcept { return data_.data(); }
    double* data() noexcept { return data_.data(); }
    const double* row(std::size_t i) const noexcept { return data_.data() + i * cols_; }
    double* row(std::size_t i) noexcept { return data_.data() + i * cols_; }

    std::span<const double> entries() const noexcept { return data_; }

    bool all_finite() const noexcept;
    /// Sum of squared entries.
    double frobenius_sq() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Singular values sorted non-increasing, length min(rows, cols).
struct SingularSpectrum {
    std::vector<double> values;

    double frobenius_sq() const noexcept;
    double operator_norm() const noexcept { return values.empty() ? 0.0 : values.front(); }
    /// Number of values above the relative noise floor 1e-12 * sigma_1.
    std::size_t numerical_rank() const noexcept;
};

struct StableRanks {
    double r_inf = 0.0;     // ||A||_F^2 / ||A||^2
    double r_4 = 0.0;       // ||A||_F^4 / ||A A^T||_F^2
    double frob_sq = 0.0;   // ||A||_F^2
    double op_norm_sq = 0.0;  // ||A||^2
};

SingularSpectrum singular_spectrum(const DenseMatrix& a);
StableRanks stable_ranks(const DenseMatrix& a);
StableRanks stable_ranks(const SingularSpectrum& spectrum);

/// tr(Sigma) / ||Sigma|| for a symmetric PSD matrix. Rejects matrices that
/// are asymmetric beyond 1e-9 * ||Sigma||_F or meaningfully indefinite.
double intrinsic_dimension(const DenseMatrix& sigma);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
/// Start vector: the normalized all-ones vector, with a deterministic ramp
/// perturbation applied if the iteration stalls orthogonal to the dominant
/// eigenspace. Iteration cap: ceil(10 n log n) + 100. Throws numeric_error
/// (carrying the best estimate) if the cap is hit before the residual
/// certifies relative accuracy tol.
double top_eigenvalue(const DenseMatrix& sigma, double tol);

/// Operator norm max|lambda| of a symmetric (possibly indefinite) matrix,
/// via power iteration on B^2.
double operator_norm_symmetric(const DenseMatrix& b, double tol);

// C = A * B and C = A * B^T on row-major data, routed through the kernels.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace bulkjl
