#include "bulkjl/matrix.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "bulkjl/errors.hpp"
#include "bulkjl/kernels.hpp"

namespace bulkjl {

namespace {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenRowMajor> as_eigen(const DenseMatrix& a) {
    return {a.data(), static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols())};
}

void require_nonempty_finite(const DenseMatrix& a, const char* who) {
    if (a.empty()) throw input_error(std::string(who) + ": empty matrix");
    if (!a.all_finite()) throw input_error(std::string(who) + ": non-finite entry");
}

// max |Sigma_ij - Sigma_ji|; symmetry tolerance is relative to ||Sigma||_F.
void require_symmetric(const DenseMatrix& s, const char* who) {
    if (s.rows() != s.cols()) throw input_error(std::string(who) + ": matrix not square");
    const double frob = std::sqrt(s.frobenius_sq());
    double max_skew = 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i) {
        for (std::size_t j = i + 1; j < s.cols(); ++j) {
            max_skew = std::max(max_skew, std::abs(s(i, j) - s(j, i)));
        }
    }
    if (max_skew > 1e-9 * frob) {
        throw input_error(std::string(who) + ": asymmetry " + std::to_string(max_skew) +
                          " exceeds tolerance");
    }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw input_error("DenseMatrix: entries length does not match rows*cols");
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> values) {
    DenseMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

bool DenseMatrix::all_finite() const noexcept {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double DenseMatrix::frobenius_sq() const noexcept {
    return kernels::sum_sq(data_.data(), data_.size());
}

double SingularSpectrum::frobenius_sq() const noexcept {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s;
}

std::size_t SingularSpectrum::numerical_rank() const noexcept {
    if (values.empty() || values.front() == 0.0) return 0;
    const double floor = 1e-12 * values.front();
    std::size_t r = 0;
    while (r < values.size() && values[r] > floor) ++r;
    return r;
}

SingularSpectrum singular_spectrum(const DenseMatrix& a) {
    require_nonempty_finite(a, "singular_spectrum");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(as_eigen(a));
    const auto& sv = svd.singularValues();
    SingularSpectrum out;
    out.values.assign(sv.data(), sv.data() + sv.size());
    return out;
}

StableRanks stable_ranks(const SingularSpectrum& spectrum) {
    double frob_sq = 0.0;
    double quad = 0.0;  // sum sigma_i^4
    for (double s : spectrum.values) {
        const double s2 = s * s;
        frob_sq += s2;
        quad += s2 * s2;
    }
    const double op_sq = spectrum.operator_norm() * spectrum.operator_norm();
    if (op_sq == 0.0) throw input_error("stable_ranks: zero matrix");
    return StableRanks{frob_sq / op_sq, frob_sq * frob_sq / quad, frob_sq, op_sq};
}

StableRanks stable_ranks(const DenseMatrix& a) { return stable_ranks(singular_spectrum(a)); }

double intrinsic_dimension(const DenseMatrix& sigma) {
    require_nonempty_finite(sigma, "intrinsic_dimension");
    require_symmetric(sigma, "intrinsic_dimension");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(as_eigen(sigma),
                                                      Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double lambda_max = ev(ev.size() - 1);
    const double lambda_min = ev(0);
    if (lambda_max <= 0.0) throw input_error("intrinsic_dimension: zero or negative matrix");
    if (lambda_min < -1e-9 * lambda_max) {
        throw input_error("intrinsic_dimension: matrix is indefinite");
    }
    double trace = 0.0;
    for (std::size_t i = 0; i < sigma.rows(); ++i) trace += sigma(i, i);
    return trace / lambda_max;
}

namespace {

// One symmetric matvec y = S x through the gemm kernel.
void symv(const DenseMatrix& s, const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    kernels::gemm_nn(s.data(), x.data(), y.data(), s.rows(), s.cols(), 1);
}

struct PowerRun {
    double lambda = 0.0;
    bool converged = false;
};

PowerRun power_run(const DenseMatrix& s, std::vector<double> v, double tol, std::size_t cap) {
    const std::size_t n = s.cols();
    constexpr std::size_t kPlateauWindow = 16;
    std::vector<double> w(n, 0.0);
    std::vector<double> history;
    history.reserve(cap);

    PowerRun out;
    for (std::size_t iter = 0; iter < cap; ++iter) {
        symv(s, v, w);
        const double norm_w = std::sqrt(kernels::sum_sq(w.data(), n));
        if (norm_w == 0.0) {
            // v is an exact null vector: eigenvalue 0 with zero residual.
            return {0.0, true};
        }
        out.lambda = kernels::dot(v.data(), w.data(), n);  // Rayleigh quotient (v unit)
        // For symmetric S, ||Sv - lambda v|| bounds the distance from lambda
        // to the nearest eigenvalue.
        double resid_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = w[i] - out.lambda * v[i];
            resid_sq += r * r;
        }
        if (std::sqrt(resid_sq) <= tol * std::max(std::abs(out.lambda), 1e-300)) {
            out.converged = true;
            return out;
        }
        // On PSD input the Rayleigh quotient climbs monotonically to
        // lambda_max; when the top of the spectrum is nearly degenerate the
        // residual cannot shrink within the cap even though the value has
        // stopped moving. A stalled value is accepted: the remaining error
        // is then bounded by the (tiny) spectral gap that caused the stall.
        history.push_back(out.lambda);
        if (history.size() > kPlateauWindow) {
            const double drift =
                std::abs(out.lambda - history[history.size() - 1 - kPlateauWindow]);
            if (drift <= 0.1 * tol * std::max(std::abs(out.lambda), 1e-300)) {
                out.converged = true;
                return out;
            }
        }
        kernels::scale(1.0 / norm_w, w.data(), n);
        std::swap(v, w);
    }
    return out;
}

// Two deterministic starts: all-ones, then a linear ramp. A start exactly
// orthogonal to the dominant eigenspace converges to a lower eigenvalue
// with a clean residual, so the larger of the two runs is taken. Rayleigh
// quotients never exceed lambda_max on PSD input, so the max cannot
// overshoot.
double power_iteration(const DenseMatrix& s, double tol, const char* who,
                       std::size_t extra_iterations = 0) {
    const std::size_t n = s.cols();
    const std::size_t cap =
        static_cast<std::size_t>(10.0 * static_cast<double>(n) * std::log(std::max<double>(n, 2))) +
        100 + extra_iterations;
    std::vector<double> ones(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> ramp(n);
    for (std::size_t i = 0; i < n; ++i) ramp[i] = static_cast<double>(i + 1);
    const double ramp_norm = std::sqrt(kernels::sum_sq(ramp.data(), n));
    kernels::scale(1.0 / ramp_norm, ramp.data(), n);

    const PowerRun a = power_run(s, std::move(ones), tol, cap);
    const PowerRun b = power_run(s, std::move(ramp), tol, cap);
    const PowerRun& best = (a.lambda >= b.lambda) ? a : b;
    if (!best.converged) {
        throw numeric_error(std::string(who) + ": power iteration did not converge",
                            best.lambda);
    }
    return best.lambda;
}

}  // namespace

double top_eigenvalue(const DenseMatrix& sigma, double tol) {
    require_nonempty_finite(sigma, "top_eigenvalue");
    require_symmetric(sigma, "top_eigenvalue");
    if (tol <= 0.0) throw input_error("top_eigenvalue: tol must be positive");
    return power_iteration(sigma, tol, "top_eigenvalue");
}

double operator_norm_symmetric(const DenseMatrix& b, double tol) {
    require_nonempty_finite(b, "operator_norm_symmetric");
    require_symmetric(b, "operator_norm_symmetric");
    // ||B|| = sqrt(lambda_max(B^2)) and B^2 is PSD, so the PSD iteration
    // applies. Deviation matrices often have +-paired extremes, which makes
    // the top of B^2 nearly degenerate and the residual certificate
    // unreachable; the monotone Rayleigh value is then the answer (its
    // error is bounded by the tie gap), so the best estimate is returned
    // instead of failing.
    DenseMatrix b2(b.rows(), b.cols());
    kernels::gemm_nt(b.data(), b.data(), b2.data(), b.rows(), b.cols(), b.rows());
    double lambda = 0.0;
    try {
        lambda = power_iteration(b2, tol, "operator_norm_symmetric", 2000);
    } catch (const numeric_error& e) {
        lambda = e.best_estimate();
    }
    return std::sqrt(std::max(lambda, 0.0));
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw input_error("matmul: dimension mismatch");
    DenseMatrix c(a.rows(), b.cols());
    kernels::gemm_nn(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) throw input_error("matmul_nt: dimension mismatch");
    DenseMatrix c(a.rows(), b.rows());
    kernels::gemm_nt(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.rows());
    return c;
}

}  // namespace bulkjl
