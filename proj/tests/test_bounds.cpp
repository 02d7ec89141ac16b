#include "doctest.h"

#include <cmath>

#include "bulkjl/bounds.hpp"
#include "bulkjl/errors.hpp"
#include "bulkjl/matrix.hpp"
#include "oracles.hpp"

using namespace bulkjl;
using namespace bulkjl::bounds;

namespace {

// Independent long-double evaluation path for the target-dimension
// formulas, written from the closed forms directly.
long double c_eps_ld(long double eps) {
    const long double base = (1 + eps) * (1 + eps) + sqrtl(2.0L) * (1 - eps) * (1 - eps);
    return base * base / 4.0L;
}

long double simplex_k_ld(long double d, long double eta, long double eps, long double delta) {
    const long double e = expl(1.0L);
    return 2.0L * c_eps_ld(eps) / (eps * eps) *
           (logl(2.0L * e / eta) + logl(d / delta) / fmaxl(eta * d, 1.0L));
}

long double unit_k_ld(long double n, long double m, long double eta, long double eps,
                      long double delta, long double r_hat) {
    const long double e = expl(1.0L);
    return c_eps_ld(eps) / (eps * eps) *
           (logl(2.0L * e / eta) * m / r_hat +
            logl(n * n / (m * delta)) / fmaxl(eta * r_hat, 1.0L));
}

long double free_k_ld(long double n, long double m, long double eta, long double eps,
                      long double delta, long double r_inf) {
    const long double e = expl(1.0L);
    return c_eps_ld(eps) / (eps * eps) *
           (logl(2.0L * e / eta) * eta * m / r_inf + logl(n * n / (m * delta)) / r_inf);
}

void check_split_identities(const EpsilonSplit& s) {
    const double eps = s.eps;
    CHECK(std::abs(s.eps_plus - s.theta * s.eps_minus) <= 1e-12);
    CHECK(std::abs((1.0 - eps) * (1.0 - eps) / s.gamma - (1.0 - s.eps_minus)) <= 1e-12);
    CHECK(std::abs((1.0 + eps) * (1.0 + eps) / s.gamma - (1.0 + s.eps_plus)) <= 1e-12);
}

}  // namespace

TEST_CASE("epsilon split worked examples") {
    const auto s = epsilon_split(0.5, 1.0, 1.0);
    CHECK(s.gamma == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(s.eps_minus == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(s.eps_plus == doctest::Approx(0.8).epsilon(1e-14));
    CHECK((1.0 - 0.5) * (1.0 - 0.5) / s.gamma == doctest::Approx(0.2).epsilon(1e-14));
    check_split_identities(s);

    // Identity limit.
    const auto tiny = epsilon_split(1e-6, 1.0, 1.0);
    CHECK(std::abs(tiny.gamma - 1.0) <= 3e-6);
    CHECK(tiny.eps_minus <= 3e-6);

    // Gaussian constants C+ = 8, C- = 4 at eps = 0.5.
    const auto g = epsilon_split(0.5, 8.0, 4.0);
    CHECK(g.theta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    const long double expected = 2.0L / (2.25L + 0.25L * sqrtl(2.0L));
    CHECK(g.eps_minus == doctest::Approx(static_cast<double>(expected)).epsilon(1e-13));
    CHECK(g.eps_minus == doctest::Approx(0.76818).epsilon(1e-5));
    check_split_identities(g);
}

TEST_CASE("epsilon split identities hold on a grid") {
    for (double theta : {1.0, std::sqrt(2.0), 3.0}) {
        for (int i = 1; i <= 100; ++i) {
            const double eps = i / 101.0;
            check_split_identities(epsilon_split(eps, theta * theta, 1.0));
        }
    }
    CHECK_THROWS_AS((void)epsilon_split(0.0, 1.0, 1.0), input_error);
    CHECK_THROWS_AS((void)epsilon_split(1.0, 1.0, 1.0), input_error);
}

TEST_CASE("gaussian constants") {
    for (int i = 1; i <= 300; ++i) {
        const double eps = (2.0 / 3.0) * i / 300.0;
        const auto gc = gaussian_constants(eps);
        CHECK(gc.c_eps < 2.25);
        // Same gamma as the theta = sqrt(2) epsilon split (dual route).
        const auto s = epsilon_split(eps, 8.0, 4.0);
        CHECK(gc.gamma_eps == doctest::Approx(s.gamma).epsilon(1e-13));
        // C(eps) = 4 eps^2 / eps_minus^2 via the adjustment lemma.
        CHECK(gc.c_eps ==
              doctest::Approx(4.0 * eps * eps / (s.eps_minus * s.eps_minus)).epsilon(1e-12));
    }
    const auto edge = gaussian_constants(2.0 / 3.0);
    const double expected_gamma =
        ((5.0 / 3.0) * (5.0 / 3.0) + (1.0 / 3.0) * (1.0 / 3.0) * std::sqrt(2.0)) /
        (1.0 + std::sqrt(2.0));
    CHECK(edge.gamma_eps == doctest::Approx(expected_gamma).epsilon(1e-14));
    CHECK(gaussian_constants(1e-9).gamma_eps == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS((void)gaussian_constants(0.7), input_error);
    CHECK_THROWS_AS((void)gaussian_constants(0.0), input_error);
}

TEST_CASE("hanson-wright tail rates") {
    const auto id16 = stable_ranks(DenseMatrix::identity(16));
    // exp(-k eps^2 r_inf / 8) = exp(-4) at k=8, eps=0.5; the min branch gives
    // the same value on a flat spectrum with eps r_4 < r_inf.
    CHECK(hw_tail_rate(id16, 8, 0.5, 1.0, TailVariant::gaussian_upper) ==
          doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
    CHECK(hw_tail_rate(id16, 8, 0.5, 1.0, TailVariant::gaussian_lower) ==
          doctest::Approx(std::exp(-8.0)).epsilon(1e-12));

    // Flat spectrum: min branch picks eps * r_4 when eps < 1.
    CHECK(std::min(0.5 * id16.r_4, id16.r_inf) == doctest::Approx(0.5 * id16.r_4));

    // eps -> 0 makes the bound vacuous.
    CHECK(hw_tail_rate(id16, 8, 1e-9, 1.0, TailVariant::gaussian_upper) ==
          doctest::Approx(1.0).epsilon(1e-6));

    // Sub-gaussian form with c = 1, K = 1.
    const double expected =
        2.0 * std::exp(-8.0 * std::min(0.25 * id16.r_4, 0.5 * id16.r_inf));
    CHECK(hw_tail_rate(id16, 8, 0.5, 1.0, TailVariant::subgaussian) ==
          doctest::Approx(expected).epsilon(1e-12));

    // r_4 >= r_inf always; the min branch is the tighter upper bound exactly
    // when eps r_4 >= r_inf (one factor of eps saved).
    const auto geo = stable_ranks(DenseMatrix::diagonal(std::vector<double>{1.0, 0.8, 0.64}));
    CHECK(geo.r_4 >= geo.r_inf);
    {
        // One dominant value over a long flat tail gives r_4 >> r_inf; at
        // eps = 0.5 the min branch exp(-k eps r_inf / 8) then undercuts
        // exp(-k eps^2 r_inf / 8), saving a factor of eps.
        SingularSpectrum spread;
        spread.values.assign(1601, 0.05);
        spread.values.front() = 1.0;
        const auto ranks = stable_ranks(spread);
        const double eps = 0.5;
        const int k = 8;
        CHECK(eps * ranks.r_4 >= ranks.r_inf);
        const double min_branch =
            std::exp(-k * (eps / 8.0) * std::min(eps * ranks.r_4, ranks.r_inf));
        const double square_branch = std::exp(-k * eps * eps * ranks.r_inf / 8.0);
        CHECK(min_branch <= square_branch);
        CHECK(hw_tail_rate(ranks, k, eps, 1.0, TailVariant::gaussian_upper) ==
              doctest::Approx(min_branch).epsilon(1e-12));
    }
}

TEST_CASE("free-decomposition target dimension") {
    DistParams gaussian;

    // R_inf = eta M cancels the ratio in the first term.
    const auto r1 = target_dim_free(1024, 320, 0.1, 0.5, 0.05, 32.0, gaussian);
    const double c_eps = gaussian_constants(0.5).c_eps;
    const double term1 = std::log(2.0 * std::exp(1.0) / 0.1);
    const double term2 = std::log(1024.0 * 1024.0 / (320.0 * 0.05)) / 32.0;
    CHECK(r1.k_real == doctest::Approx(c_eps / 0.25 * (term1 + term2)).epsilon(1e-12));

    // Doubling R halves the pre-ceiling value.
    const auto half = target_dim_free(1024, 320, 0.1, 0.5, 0.05, 64.0, gaussian);
    CHECK(half.k_real == doctest::Approx(r1.k_real / 2.0).epsilon(1e-12));

    // Dual-path arithmetic.
    const long double ld = free_k_ld(1024.0L, 320.0L, 0.1L, 0.5L, 0.05L, 32.0L);
    CHECK(static_cast<double>(ld) == doctest::Approx(r1.k_real).epsilon(1e-12));
    CHECK(r1.k == static_cast<int>(std::ceil(static_cast<double>(ld) - 1e-12)));
    CHECK(r1.all_satisfied());
    CHECK(r1.gamma == doctest::Approx(gaussian_constants(0.5).gamma_eps));

    // Non-gaussian entries flag the non-rigorous constant and gamma 1+eps^2.
    DistParams sub;
    sub.gaussian_entries = false;
    sub.psi2 = 1.2;
    const auto r2 = target_dim_free(1024, 320, 0.1, 0.5, 0.05, 32.0, sub);
    CHECK(r2.non_rigorous_constants);
    CHECK(r2.gamma == doctest::Approx(1.25));

    // Violated preconditions are recorded, not thrown.
    const auto bad = target_dim_free(1024, 320, 0.1, 0.5, 0.05, 0.5, gaussian);
    CHECK_FALSE(bad.all_satisfied());
}

TEST_CASE("unit-decomposition target dimension") {
    DistParams gaussian;
    // Rhat = M/2 doubles the log(2e/eta) coefficient.
    const auto r = target_dim_unit(1024, 1024, 0.1, 0.5, 0.05, 512.0, gaussian);
    const double c_eps = gaussian_constants(0.5).c_eps;
    const double first = c_eps / 0.25 * std::log(2.0 * std::exp(1.0) / 0.1) * 2.0;
    CHECK(r.k_real > first);

    // Simplex at D = 1024 through the unit formula: frozen k = 56.
    CHECK(r.k == 56);
    const long double ld = unit_k_ld(1024.0L, 1024.0L, 0.1L, 0.5L, 0.05L, 512.0L);
    CHECK(static_cast<double>(ld) == doctest::Approx(r.k_real).epsilon(1e-12));

    // eta * Rhat below 1 clamps the second denominator.
    const auto clamped = target_dim_unit(64, 8, 0.1, 0.5, 0.05, 2.0, gaussian);
    const double term2 = std::log(64.0 * 64.0 / (8.0 * 0.05));
    const double term1 = std::log(2.0 * std::exp(1.0) / 0.1) * 8.0 / 2.0;
    CHECK(clamped.k_real == doctest::Approx(c_eps / 0.25 * (term1 + term2)).epsilon(1e-12));
}

TEST_CASE("simplex target dimension") {
    DistParams gaussian;
    const auto r = target_dim_simplex(256, 0.1, 0.5, 0.05, gaussian);
    CHECK(r.k == 59);
    const long double ld = simplex_k_ld(256.0L, 0.1L, 0.5L, 0.05L);
    CHECK(static_cast<double>(ld) == doctest::Approx(r.k_real).epsilon(1e-12));

    // Bounded independent of D once eta D >= log(D/delta).
    const auto base = target_dim_simplex(4096, 0.1, 0.5, 0.05, gaussian);
    const auto big = target_dim_simplex(16384, 0.1, 0.5, 0.05, gaussian);
    CHECK(big.k_real <= base.k_real);
    CHECK(big.k_real >= base.k_real - 1.0);

    // eta D < 1 exercises the clamp.
    const auto clamp = target_dim_simplex(1, 0.5, 0.5, 0.05, gaussian);
    const double expected = 2.0 * gaussian_constants(0.5).c_eps / 0.25 *
                            (std::log(2.0 * std::exp(1.0) / 0.5) + std::log(1.0 / 0.05));
    CHECK(clamp.k_real == doctest::Approx(expected).epsilon(1e-12));

    // eta = 1 is the degenerate-but-valid edge of the domain.
    CHECK_NOTHROW((void)target_dim_simplex(1, 1.0, 0.5, 0.05, gaussian));
    CHECK_THROWS_AS((void)target_dim_simplex(1, 1.5, 0.5, 0.05, gaussian), input_error);
}

TEST_CASE("subgaussian iid-coordinate target dimension") {
    DistParams gaussian;
    const auto r =
        target_dim_subgaussian_iid(4096, 512, 0.1, 0.5, 0.05, 1.0, 0.5, 1.0, gaussian);
    CHECK(r.non_rigorous_constants);

    // Dual-path arithmetic.
    const long double e = expl(1.0L);
    const long double log_ratio = logl(4096.0L * 4096.0L / (512.0L * 0.05L));
    const long double prefactor = 4.0L * 1.0L * (1.0L + 4.0L) / 0.5L;
    const long double expected = c_eps_ld(0.5L) / 0.25L * prefactor *
                                 (logl(2.0L * e / 0.1L) + log_ratio / 51.2L);
    CHECK(static_cast<double>(expected) == doctest::Approx(r.k_real).epsilon(1e-12));

    // Constraint: D < alpha^-2 log(N^2/(D delta)) flags.
    const auto flagged =
        target_dim_subgaussian_iid(4096, 8, 0.5, 0.5, 0.05, 0.02, 0.5, 1.0, gaussian);
    bool found = false;
    for (const auto& c : flagged.constraints) {
        if (c.name == "D_ge_alpha_bound") {
            found = true;
            CHECK_FALSE(c.satisfied);
        }
    }
    CHECK(found);

    // k diverges monotonically as t -> 1.
    double last = 0.0;
    for (double t : {0.5, 0.7, 0.9, 0.99}) {
        const auto rt = target_dim_subgaussian_iid(4096, 512, 0.1, 0.5, 0.05, 1.0, t, 1.0, gaussian);
        CHECK(rt.k_real > last);
        last = rt.k_real;
    }
}

TEST_CASE("unit-sphere target dimension") {
    DistParams gaussian;

    // Feasible instance: N = 10^6, D = 128, r_hat = 64.
    const auto r = target_dim_unit_sphere(1000000, 128, 0.1, 0.1, 0.5, 0.05, 2.0, 64.0, gaussian);
    const double t_prime = *r.constant("t_prime");
    {
        // Dual-path t', M, k in long double.
        const long double e = expl(1.0L);
        const long double n1 = 999999.0L;
        const long double tp = 8.0L * 2.0L * 64.0L * logl(3.0L * n1 / 0.1L) / (0.1L * n1);
        CHECK(static_cast<double>(tp) == doctest::Approx(t_prime).epsilon(1e-13));
        const long double m = ceill(2.0L * 64.0L * (logl(6.0L * e / 0.1L) + logl(128.0L)) /
                                    (1.0L - tp));
        CHECK(static_cast<double>(m) == doctest::Approx(*r.constant("M")).epsilon(1e-13));
        const long double c_alpha = 2.0L + 4.0L / 3.0L + sqrtl(4.0L);
        const long double eta_adj = floorl(0.1L * m) / m;
        const long double n_b = floorl(n1 / (4.0L * m));
        const long double zeta_adj = floorl(0.1L * n_b) / n_b;
        const long double term1 =
            logl(2.0L * e / eta_adj) * (logl(6.0L * e / zeta_adj) + logl(128.0L)) / (1.0L - tp);
        const long double term2 =
            logl(1000000.0L * 1000000.0L / (2.0L * 64.0L * 0.05L * logl(128.0L))) /
            (2.0L * fmaxl(eta_adj * 64.0L, 1.0L));
        const long double k = c_eps_ld(0.5L) / 0.25L * c_alpha * (term1 + term2);
        CHECK(static_cast<double>(k) == doctest::Approx(r.k_real).epsilon(1e-12));
        CHECK(r.k == static_cast<int>(std::ceil(static_cast<double>(k) - 1e-12)));
    }
    CHECK(t_prime < 1.0);
    CHECK(*r.constant("C_alpha") == doctest::Approx(2.0 + 4.0 / 3.0 + std::sqrt(4.0)));

    // At N = 10^5 the same parameters give t' = 1.53 > 1: hard error,
    // confirmed against the independent long-double path.
    {
        const long double n1 = 99999.0L;
        const long double tp = 8.0L * 2.0L * 64.0L * logl(3.0L * n1 / 0.1L) / (0.1L * n1);
        CHECK(static_cast<double>(tp) > 1.0);
        CHECK_THROWS_AS(
            (void)target_dim_unit_sphere(100000, 128, 0.1, 0.1, 0.5, 0.05, 2.0, 64.0, gaussian),
            constraint_error);
    }

    // r_hat = D reproduces the iid-coordinates corollary exactly.
    const auto iid = target_dim_unit_sphere(1000000, 128, 0.1, 0.1, 0.5, 0.05, 2.0, 128.0, gaussian);
    CHECK(iid.k >= 1);

    // C_alpha = alpha + 4/3 + sqrt(2 alpha) is increasing, so the grid
    // search oracle lands on the smallest alpha.
    double best_alpha = 0.0;
    double best = 1e300;
    for (double alpha = 0.5; alpha <= 8.0 + 1e-9; alpha += 0.25) {
        const double c = alpha + 4.0 / 3.0 + std::sqrt(2.0 * alpha);
        if (c < best) {
            best = c;
            best_alpha = alpha;
        }
    }
    CHECK(best_alpha == doctest::Approx(0.5));
}

TEST_CASE("target dimensions are monotone in their parameters") {
    DistParams gaussian;
    double previous = 1e300;
    for (double r = 2.0; r <= 64.0; r *= 2.0) {
        const auto result = target_dim_unit(4096, 64, 0.1, 0.5, 0.05, r, gaussian);
        CHECK(result.k_real < previous);
        previous = result.k_real;
    }
    // Shrinking delta, eta, eps all push k up.
    const auto base = target_dim_simplex(256, 0.1, 0.5, 0.05, gaussian);
    CHECK(target_dim_simplex(256, 0.1, 0.5, 0.01, gaussian).k_real > base.k_real);
    CHECK(target_dim_simplex(256, 0.05, 0.5, 0.05, gaussian).k_real > base.k_real);
    CHECK(target_dim_simplex(256, 0.1, 0.25, 0.05, gaussian).k_real > base.k_real);
}

TEST_CASE("tau_plus closed form") {
    // K=1, M = 8 r (u + log D): tau = 1/6 + 1/2 = 2/3 exactly.
    const double u = std::log(2.0 / 0.05);
    const double r = 32.0;
    const double m = 8.0 * r * (u + std::log(32.0));
    CHECK(bounds::tau_plus(u, r, m, 1.0, 32) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    // Decreasing in M, increasing in u and r.
    double last = 1e300;
    for (double mm : {100.0, 1000.0, 10000.0, 100000.0}) {
        const double v = bounds::tau_plus(1.0, 8.0, mm, 1.0, 16);
        CHECK(v < last);
        last = v;
    }
    CHECK(bounds::tau_plus(2.0, 8.0, 100.0, 1.0, 16) > bounds::tau_plus(1.0, 8.0, 100.0, 1.0, 16));
    CHECK(bounds::tau_plus(1.0, 9.0, 100.0, 1.0, 16) > bounds::tau_plus(1.0, 8.0, 100.0, 1.0, 16));
    CHECK_THROWS_AS((void)bounds::tau_plus(0.0, 8.0, 100.0, 1.0, 16), input_error);
}

TEST_CASE("binomial log bound") {
    // C(4,2) = 6 <= (2e)^2.
    CHECK(std::exp(log_binom_bound(4, 2)) == doctest::Approx(29.556).epsilon(1e-3));
    CHECK(6.0 <= std::exp(log_binom_bound(4, 2)));
    for (std::size_t m = 2; m <= 30; ++m) {
        for (std::size_t j = 1; j <= m / 2; ++j) {
            const double exact = static_cast<double>(oracles::binomial_exact(m, j));
            CHECK(exact <= std::exp(log_binom_bound(m, j)) * (1.0 + 1e-12));
        }
    }
    CHECK_THROWS_AS((void)log_binom_bound(10, 0), input_error);
    CHECK_THROWS_AS((void)log_binom_bound(10, 6), input_error);
}

TEST_CASE("retraction bound") {
    // p = 0: r_hat >= eps r.
    const auto clean = retraction_bound(10.0, 0.0, 0.5);
    CHECK(clean.r_hat_lower == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(clean.sigma_hat_upper == doctest::Approx(0.2).epsilon(1e-14));

    // r = 1 gives a bound >= 1, vacuous since ||Sigma_hat|| <= 1 always.
    CHECK(retraction_bound(1.0, 0.1, 0.5).sigma_hat_upper >= 1.0);

    // Discrete two-cluster law: exact enumeration of Sigma and Sigma_hat.
    // Atoms: y = 3 e1 w.p. 1/2, y = e2 w.p. 1/2.
    const double tr = 0.5 * 9.0 + 0.5 * 1.0;  // E||y||^2 = 5
    const double sigma_norm = 4.5;             // max(9/2, 1/2)
    const double r = tr / sigma_norm;
    for (double eps : {0.1, 0.5, 0.9}) {
        // ||y||^2 in {9, 1}; small ball p(eps) = P(||y||^2 < 5 eps).
        const double p = (9.0 < 5.0 * eps ? 0.5 : 0.0) + (1.0 < 5.0 * eps ? 0.5 : 0.0);
        const double sigma_hat_norm = 0.5;  // unit versions are e1, e2
        const auto b = retraction_bound(r, p, eps);
        CHECK(sigma_hat_norm <= b.sigma_hat_upper + 1e-9);
        CHECK(1.0 / sigma_hat_norm >= b.r_hat_lower - 1e-9);
    }
}
