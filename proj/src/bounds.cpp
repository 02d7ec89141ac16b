#include "bulkjl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bulkjl/errors.hpp"

namespace bulkjl::bounds {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kE = 2.7182818284590452353602874713527;

void require_unit_interval(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) {
        throw input_error(std::string(name) + " must lie in (0,1), got " + std::to_string(v));
    }
}

// eta = 1 is degenerate but meaningful (a whole batch may fail).
void require_fraction(double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) {
        throw input_error(std::string(name) + " must lie in (0,1], got " + std::to_string(v));
    }
}

// C_[2.5]: the coefficient in front of 1/eps^2 for the chosen entry law,
// and the matching gamma. Gaussian entries get fully explicit constants;
// other sub-gaussian laws get C_absolute * max(K^4, K^2) with gamma 1+eps^2.
struct Coefficient {
    double value;
    double gamma;
    bool non_rigorous;
};

Coefficient theorem_coefficient(double eps, const DistParams& dist) {
    if (dist.gaussian_entries) {
        const GaussianConstants gc = gaussian_constants(eps);
        return {gc.c_eps, gc.gamma_eps, false};
    }
    const double k2 = dist.psi2 * dist.psi2;
    return {dist.C_absolute * std::max(k2 * k2, k2), 1.0 + eps * eps, true};
}

void push_constraint(TargetDimResult& r, std::string name, bool ok, double slack) {
    r.constraints.push_back(Constraint{std::move(name), ok, slack});
}

// eta*M must be a strictly positive integer; records the constraint.
void check_integrality(TargetDimResult& r, const char* name, double product) {
    const double rounded = std::round(product);
    const bool ok = rounded >= 1.0 && std::abs(product - rounded) <= 1e-9;
    push_constraint(r, std::string(name) + "_integral", ok,
                    ok ? 0.0 : -(std::abs(product - rounded)));
}

int finish(TargetDimResult& r, double k_real) {
    r.k_real = k_real;
    r.k = static_cast<int>(std::ceil(k_real - 1e-12));
    return r.k;
}

EpsilonSplit epsilon_split_theta(double eps, double theta) {
    EpsilonSplit s;
    s.eps = eps;
    s.theta = theta;
    const double up = (1.0 + eps) * (1.0 + eps);
    const double down = (1.0 - eps) * (1.0 - eps);
    s.eps_minus = 4.0 * eps / (up + theta * down);
    s.eps_plus = theta * s.eps_minus;
    s.gamma = (up + theta * down) / (1.0 + theta);
    return s;
}

}  // namespace

bool TargetDimResult::all_satisfied() const {
    return std::all_of(constraints.begin(), constraints.end(),
                       [](const Constraint& c) { return c.satisfied; });
}

const double* TargetDimResult::constant(const std::string& name) const {
    for (const auto& [key, value] : constants_used) {
        if (key == name) return &value;
    }
    return nullptr;
}

EpsilonSplit epsilon_split(double eps, double c_plus, double c_minus) {
    require_unit_interval(eps, "eps");
    if (c_plus <= 0.0 || c_minus <= 0.0) throw input_error("epsilon_split: C_+/- must be positive");
    return epsilon_split_theta(eps, std::sqrt(c_plus / c_minus));
}

GaussianConstants gaussian_constants(double eps) {
    if (!(eps > 0.0 && eps <= 2.0 / 3.0)) {
        throw input_error("gaussian_constants: eps must lie in (0, 2/3], got " +
                          std::to_string(eps));
    }
    const double base = (1.0 + eps) * (1.0 + eps) + kSqrt2 * (1.0 - eps) * (1.0 - eps);
    GaussianConstants gc;
    gc.c_eps = base * base / 4.0;
    gc.gamma_eps = base / (1.0 + kSqrt2);
    // The theorem asserts C(eps) < 2.25 on the whole domain; treat an
    // excursion as a numeric fault rather than silently returning it.
    if (!(gc.c_eps < 2.25)) {
        throw numeric_error("gaussian_constants: C(eps) >= 2.25", gc.c_eps);
    }
    return gc;
}

double hw_tail_rate(const StableRanks& ranks, int k, double eps_minus, double K,
                    TailVariant variant, double c_absolute) {
    if (k < 1) throw input_error("hw_tail_rate: k must be >= 1");
    const double eps = eps_minus;
    switch (variant) {
        case TailVariant::subgaussian: {
            require_unit_interval(eps, "eps_minus");
            if (K <= 0.0) throw input_error("hw_tail_rate: K must be positive");
            const double k2 = K * K;
            const double rate =
                std::min(eps * eps * ranks.r_4 / (k2 * k2), eps * ranks.r_inf / k2);
            return 2.0 * std::exp(-c_absolute * k * rate);
        }
        case TailVariant::gaussian_upper: {
            if (eps <= 0.0) throw input_error("hw_tail_rate: eps must be positive");
            const double min_branch =
                std::exp(-k * (eps / 8.0) * std::min(eps * ranks.r_4, ranks.r_inf));
            if (eps < 1.0) {
                const double square_branch = std::exp(-k * eps * eps * ranks.r_inf / 8.0);
                return std::min(square_branch, min_branch);
            }
            return min_branch;
        }
        case TailVariant::gaussian_lower: {
            require_unit_interval(eps, "eps_minus");
            return std::exp(-k * eps * eps * ranks.r_4 / 4.0);
        }
    }
    throw input_error("hw_tail_rate: unknown variant");
}

TargetDimResult target_dim_free(std::size_t n, std::size_t m, double eta, double eps,
                                double delta, double r_inf, const DistParams& dist) {
    require_fraction(eta, "eta");
    require_unit_interval(delta, "delta");
    const Coefficient coeff = theorem_coefficient(eps, dist);

    TargetDimResult r;
    r.gamma = coeff.gamma;
    r.non_rigorous_constants = coeff.non_rigorous;
    r.constants_used.emplace_back("C_coefficient", coeff.value);
    r.constants_used.emplace_back("gamma", coeff.gamma);
    check_integrality(r, "eta_M", eta * static_cast<double>(m));
    push_constraint(r, "R_inf_ge_1", r_inf >= 1.0, r_inf - 1.0);
    push_constraint(r, "eps_le_two_thirds", eps <= 2.0 / 3.0, 2.0 / 3.0 - eps);

    const double eta_m = eta * static_cast<double>(m);
    const double nn = static_cast<double>(n);
    const double term1 = std::log(2.0 * kE / eta) * eta_m / r_inf;
    const double term2 = std::log(nn * nn / (static_cast<double>(m) * delta)) / r_inf;
    finish(r, coeff.value / (eps * eps) * (term1 + term2));
    return r;
}

TargetDimResult target_dim_unit(std::size_t n, std::size_t m, double eta, double eps,
                                double delta, double r_hat_inf, const DistParams& dist) {
    require_fraction(eta, "eta");
    require_unit_interval(delta, "delta");
    const Coefficient coeff = theorem_coefficient(eps, dist);

    TargetDimResult r;
    r.gamma = coeff.gamma;
    r.non_rigorous_constants = coeff.non_rigorous;
    r.constants_used.emplace_back("C_coefficient", coeff.value);
    r.constants_used.emplace_back("gamma", coeff.gamma);
    check_integrality(r, "eta_M", eta * static_cast<double>(m));
    push_constraint(r, "Rhat_inf_ge_1", r_hat_inf >= 1.0, r_hat_inf - 1.0);
    push_constraint(r, "eps_le_two_thirds", eps <= 2.0 / 3.0, 2.0 / 3.0 - eps);

    const double nn = static_cast<double>(n);
    const double term1 = std::log(2.0 * kE / eta) * static_cast<double>(m) / r_hat_inf;
    const double term2 = std::log(nn * nn / (static_cast<double>(m) * delta)) /
                         std::max(eta * r_hat_inf, 1.0);
    finish(r, coeff.value / (eps * eps) * (term1 + term2));
    return r;
}

TargetDimResult target_dim_simplex(std::size_t d, double eta, double eps, double delta,
                                   const DistParams& dist) {
    require_fraction(eta, "eta");
    require_unit_interval(delta, "delta");
    if (d < 1) throw input_error("target_dim_simplex: D must be >= 1");
    const Coefficient coeff = theorem_coefficient(eps, dist);

    TargetDimResult r;
    r.gamma = coeff.gamma;
    r.non_rigorous_constants = coeff.non_rigorous;
    r.constants_used.emplace_back("C_coefficient", coeff.value);
    r.constants_used.emplace_back("gamma", coeff.gamma);
    push_constraint(r, "eps_le_two_thirds", eps <= 2.0 / 3.0, 2.0 / 3.0 - eps);

    const double dd = static_cast<double>(d);
    const double value = 2.0 * coeff.value / (eps * eps) *
                         (std::log(2.0 * kE / eta) + std::log(dd / delta) / std::max(eta * dd, 1.0));
    finish(r, value);
    return r;
}

TargetDimResult target_dim_subgaussian_iid(std::size_t n, std::size_t d, double eta, double eps,
                                           double delta, double alpha, double t, double psi2_xi,
                                           const DistParams& dist) {
    require_fraction(eta, "eta");
    require_unit_interval(delta, "delta");
    require_unit_interval(t, "t");
    if (alpha <= 0.0) throw input_error("target_dim_subgaussian_iid: alpha must be positive");
    if (psi2_xi <= 0.0) throw input_error("target_dim_subgaussian_iid: psi2_xi must be positive");
    const Coefficient coeff = theorem_coefficient(eps, dist);

    TargetDimResult r;
    r.gamma = coeff.gamma;
    // The operator-norm constant C and Bernstein constant c are never
    // pinned numerically by the theorem; defaults are 1 and flagged.
    r.non_rigorous_constants = true;
    r.constants_used.emplace_back("C_coefficient", coeff.value);
    r.constants_used.emplace_back("gamma", coeff.gamma);
    r.constants_used.emplace_back("opnorm_C", dist.C_absolute);
    r.constants_used.emplace_back("bernstein_c", dist.c_absolute);

    const double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    const double log_ratio = std::log(nn * nn / (dd * delta));
    const double log_eta = std::log(2.0 * kE / eta);
    const double eta_d = eta * dd;

    check_integrality(r, "eta_D", eta_d);
    push_constraint(r, "eps_le_two_thirds", eps <= 2.0 / 3.0, 2.0 / 3.0 - eps);
    push_constraint(r, "N_ge_D", n >= d, nn - dd);
    const double d_bound_alpha = log_ratio / (alpha * alpha);
    push_constraint(r, "D_ge_alpha_bound", dd >= d_bound_alpha, dd - d_bound_alpha);
    const double k_psi1 = 2.0 * psi2_xi * psi2_xi + 1.0 / std::log(2.0);
    const double d_bound_t =
        k_psi1 * k_psi1 / (dist.c_absolute * t * t) * (log_ratio / eta_d + log_eta);
    push_constraint(r, "D_ge_bernstein_bound", dd >= d_bound_t, dd - d_bound_t);

    const double prefactor = 4.0 * dist.C_absolute * dist.C_absolute * psi2_xi * psi2_xi *
                             (1.0 + (1.0 + alpha) * (1.0 + alpha)) / (1.0 - t);
    finish(r, coeff.value / (eps * eps) * prefactor * (log_eta + log_ratio / eta_d));
    return r;
}

TargetDimResult target_dim_unit_sphere(std::size_t n, std::size_t d, double eta, double zeta,
                                       double eps, double delta, double alpha, double r_hat,
                                       const DistParams& dist) {
    require_fraction(eta, "eta");
    require_unit_interval(zeta, "zeta");
    require_unit_interval(delta, "delta");
    if (alpha <= 0.0) throw input_error("target_dim_unit_sphere: alpha must be positive");
    if (r_hat < 1.0) throw input_error("target_dim_unit_sphere: r_hat must be >= 1");
    if (d < 2) throw input_error("target_dim_unit_sphere: D must be >= 2");
    const Coefficient coeff = theorem_coefficient(eps, dist);

    TargetDimResult r;
    r.gamma = coeff.gamma;
    r.non_rigorous_constants = coeff.non_rigorous;

    const double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);

    // t' does not depend on M; it must be < 1 for the construction to exist
    // at all, so a violation is a hard error, not a recorded constraint.
    const double t_prime =
        8.0 * alpha * r_hat * std::log(3.0 * (nn - 1.0) / (2.0 * delta)) / (zeta * (nn - 1.0));
    if (!(t_prime < 1.0)) {
        throw constraint_error("target_dim_unit_sphere: t' = " + std::to_string(t_prime) +
                               " >= 1; increase N or zeta");
    }

    const double m_real = alpha * r_hat * (std::log(6.0 * kE / zeta) + std::log(dd)) /
                          (1.0 - t_prime);
    const double m = std::ceil(m_real);

    push_constraint(r, "zeta_le_half", zeta <= 0.5, 0.5 - zeta);
    push_constraint(r, "eps_le_two_thirds", eps <= 2.0 / 3.0, 2.0 / 3.0 - eps);
    push_constraint(r, "M_le_N_minus_1_over_8", m <= (nn - 1.0) / 8.0, (nn - 1.0) / 8.0 - m);

    // Integrality repairs: round eta (resp. zeta) down to the nearest value
    // making the product integral; smaller values only strengthen the
    // preserved fraction.
    double eta_adj = eta;
    {
        const double product = eta * m;
        if (std::abs(product - std::round(product)) > 1e-9) {
            const double floor_product = std::floor(product);
            push_constraint(r, "eta_M_ge_1", floor_product >= 1.0, floor_product - 1.0);
            eta_adj = std::max(floor_product, 1.0) / m;
            std::ostringstream note;
            note << "eta adjusted " << eta << " -> " << eta_adj << " for eta*M integral";
            r.adjustments.push_back(note.str());
        } else {
            push_constraint(r, "eta_M_ge_1", product >= 1.0, product - 1.0);
        }
    }
    double zeta_adj = zeta;
    const double n_batches = std::floor((nn - 1.0) / (4.0 * m));
    if (n_batches >= 1.0) {
        const double product = zeta * n_batches;
        if (std::abs(product - std::round(product)) > 1e-9) {
            const double floor_product = std::floor(product);
            push_constraint(r, "zeta_n_ge_1", floor_product >= 1.0, floor_product - 1.0);
            zeta_adj = std::max(floor_product, 1.0) / n_batches;
            std::ostringstream note;
            note << "zeta adjusted " << zeta << " -> " << zeta_adj
                 << " for zeta*floor((N-1)/(4M)) integral";
            r.adjustments.push_back(note.str());
        } else {
            push_constraint(r, "zeta_n_ge_1", product >= 1.0, product - 1.0);
        }
    } else {
        push_constraint(r, "zeta_n_ge_1", false, n_batches - 1.0);
    }

    const double c_alpha = alpha + 4.0 / 3.0 + std::sqrt(2.0 * alpha);
    const double term1 = std::log(2.0 * kE / eta_adj) *
                         (std::log(6.0 * kE / zeta_adj) + std::log(dd)) / (1.0 - t_prime);
    const double term2 = std::log(nn * nn / (alpha * r_hat * delta * std::log(dd))) /
                         (alpha * std::max(eta_adj * r_hat, 1.0));

    r.constants_used.emplace_back("C_coefficient", coeff.value);
    r.constants_used.emplace_back("gamma", coeff.gamma);
    r.constants_used.emplace_back("C_alpha", c_alpha);
    r.constants_used.emplace_back("t_prime", t_prime);
    r.constants_used.emplace_back("M", m);
    r.constants_used.emplace_back("eta_adjusted", eta_adj);
    r.constants_used.emplace_back("zeta_adjusted", zeta_adj);

    finish(r, coeff.value / (eps * eps) * c_alpha * (term1 + term2));
    return r;
}

double tau_plus(double u, double r, double m, double k_bound, std::size_t d) {
    if (u <= 0.0) throw input_error("tau_plus: u must be positive");
    if (r < 1.0) throw input_error("tau_plus: r must be >= 1");
    if (m < 1.0) throw input_error("tau_plus: M must be >= 1");
    if (k_bound < 1.0) throw input_error("tau_plus: K must be >= 1");
    const double k2 = k_bound * k_bound;
    const double load = r * (u + std::log(static_cast<double>(d))) / m;
    return (4.0 * k2 / 3.0) * load + std::sqrt(2.0 * k2 * load);
}

double log_binom_bound(std::size_t m, std::size_t j) {
    if (j < 1 || j > m / 2) {
        throw input_error("log_binom_bound: need 1 <= j <= floor(M/2)");
    }
    const double jj = static_cast<double>(j);
    return jj * std::log(kE * static_cast<double>(m) / jj);
}

RetractionBound retraction_bound(double r, double p_eps, double eps) {
    require_unit_interval(eps, "eps");
    if (r < 1.0) throw input_error("retraction_bound: r must be >= 1");
    if (p_eps < 0.0 || p_eps > 1.0) throw input_error("retraction_bound: p(eps) must be in [0,1]");
    RetractionBound b;
    b.sigma_hat_upper = 1.0 / (eps * r) + p_eps;
    b.r_hat_lower = r / (1.0 / eps + r * p_eps);
    return b;
}

}  // namespace bulkjl::bounds
