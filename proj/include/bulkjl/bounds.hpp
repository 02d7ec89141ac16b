#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bulkjl/matrix.hpp"

namespace bulkjl::bounds {

/// Squared-form tolerances eps_tilde_{+/-} and the gamma factor that make
/// the squared and unsquared distance statements equivalent:
///   (1-eps)^2 / gamma = 1 - eps_minus,  (1+eps)^2 / gamma = 1 + eps_plus,
///   eps_plus = theta * eps_minus,       theta = sqrt(c_plus / c_minus).
struct EpsilonSplit {
    double eps = 0.0;
    double theta = 1.0;
    double eps_minus = 0.0;
    double eps_plus = 0.0;
    double gamma = 1.0;
};

EpsilonSplit epsilon_split(double eps, double c_plus, double c_minus);

/// Explicit constants for Gaussian projection entries on 0 < eps <= 2/3:
///   C(eps) = ((1+eps)^2 + sqrt(2)(1-eps)^2)^2 / 4  (always < 2.25),
///   gamma(eps) = ((1+eps)^2 + sqrt(2)(1-eps)^2) / (1 + sqrt(2)).
struct GaussianConstants {
    double c_eps = 0.0;
    double gamma_eps = 0.0;
};

GaussianConstants gaussian_constants(double eps);

enum class TailVariant : std::uint8_t { subgaussian, gaussian_upper, gaussian_lower };

/// Tail-bound value for the deviation of ||Z A||_F^2 from k ||A||_F^2 by a
/// relative eps_minus, expressed through the stable ranks of A.
/// subgaussian: 2 exp(-c k min(eps^2 r_4 / K^4, eps r_inf / K^2)) with c a
/// configurable constant (default 1, non-rigorous). gaussian_upper: the
/// tighter of exp(-k eps^2 r_inf / 8) and exp(-k (eps/8) min(eps r_4,
/// r_inf)). gaussian_lower: exp(-k eps^2 r_4 / 4).
double hw_tail_rate(const StableRanks& ranks, int k, double eps_minus, double K,
                    TailVariant variant, double c_absolute = 1.0);

struct Constraint {
    std::string name;
    bool satisfied = true;
    double slack = 0.0;  // positive means margin, negative means violation
};

/// Entry law parameters for the target-dimension formulas. When
/// gaussian_entries is set, the fully explicit constants C(eps)/gamma(eps)
/// are used; otherwise C_absolute * max(K^4, K^2) with the non-rigorous
/// default C_absolute = 1 is flagged in the result.
struct DistParams {
    bool gaussian_entries = true;
    double psi2 = 1.0;           // K = ||Z_11||_psi2, used when !gaussian_entries
    double c_absolute = 1.0;     // Hanson-Wright absolute constant
    double C_absolute = 1.0;     // operator-norm (eps-net) absolute constant
};

struct TargetDimResult {
    int k = 0;
    double k_real = 0.0;  // pre-ceiling value, kept for monotonicity tests
    double gamma = 1.0;   // gamma(eps) to use with this k
    std::vector<std::pair<std::string, double>> constants_used;
    std::vector<Constraint> constraints;
    std::vector<std::string> adjustments;  // integrality repairs applied
    bool non_rigorous_constants = false;

    bool all_satisfied() const;
    const double* constant(const std::string& name) const;
};

/// Free (un-normalized) decomposition bound:
/// k >= C/eps^2 (log(2e/eta) etaM / R_inf + log(N^2/(M delta)) / R_inf).
TargetDimResult target_dim_free(std::size_t n, std::size_t m, double eta, double eps,
                                double delta, double r_inf, const DistParams& dist);

/// Unit-normalized decomposition bound:
/// k >= C/eps^2 (log(2e/eta) M / Rhat + log(N^2/(M delta)) / max(eta Rhat, 1)).
TargetDimResult target_dim_unit(std::size_t n, std::size_t m, double eta, double eps,
                                double delta, double r_hat_inf, const DistParams& dist);

/// Standard simplex in R^D:
/// k = 2C/eps^2 (log(2e/eta) + log(D/delta) / max(eta D, 1)).
TargetDimResult target_dim_simplex(std::size_t d, double eta, double eps, double delta,
                                   const DistParams& dist);

/// iid-coordinate data with sub-gaussian coordinates (psi2_xi = ||xi_1||_psi2).
TargetDimResult target_dim_subgaussian_iid(std::size_t n, std::size_t d, double eta, double eps,
                                           double delta, double alpha, double t, double psi2_xi,
                                           const DistParams& dist);

/// Arbitrary data on the unit sphere via the intrinsic dimension r_hat of
/// the unit difference vector. Computes t' (independent of M) first and
/// throws constraint_error when t' >= 1; then M, the integrality repairs
/// for eta and zeta (rounded down, recorded), and k with
/// C_alpha = alpha + 4/3 + sqrt(2 alpha). Reports "t_prime" and "M" in
/// constants_used.
TargetDimResult target_dim_unit_sphere(std::size_t n, std::size_t d, double eta, double zeta,
                                       double eps, double delta, double alpha, double r_hat,
                                       const DistParams& dist);

/// Relative covariance deviation bound
/// tau_+ = (4K^2/3) r (u + log D)/M + sqrt(2 K^2 r (u + log D)/M).
double tau_plus(double u, double r, double m, double k_bound, std::size_t d);

/// j log(e M / j), so that C(M, j) <= exp(log_binom_bound(M, j)).
double log_binom_bound(std::size_t m, std::size_t j);

/// Retraction-to-the-sphere transfer: ||Sigma_hat|| <= 1/(eps r) + p(eps)
/// and the induced lower bound r_hat >= r / (1/eps + r p(eps)).
struct RetractionBound {
    double sigma_hat_upper = 0.0;
    double r_hat_lower = 0.0;
};

RetractionBound retraction_bound(double r, double p_eps, double eps);

}  // namespace bulkjl::bounds
