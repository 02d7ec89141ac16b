#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "bulkjl/errors.hpp"
#include "bulkjl/matrix.hpp"
#include "bulkjl/rng.hpp"
#include "oracles.hpp"

using bulkjl::DenseMatrix;

namespace {

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    DenseMatrix m(rows, cols);
    const bulkjl::rng::Philox gen(seed);
    for (std::size_t i = 0; i < rows * cols; ++i) m.data()[i] = gen.gaussian_at(i);
    return m;
}

DenseMatrix random_psd(std::size_t n, std::uint64_t seed) {
    const DenseMatrix g = random_matrix(n, n + 2, seed);
    return matmul_nt(g, g);  // G G^T
}

// The D-cycle difference matrix of the standard simplex (Example values:
// sigma_j^2 = 2 - 2 cos(2 pi j / D)).
DenseMatrix cycle_circulant(std::size_t d) {
    DenseMatrix m(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        m(j, j) = 1.0;
        m((j + 1) % d, j) = -1.0;
    }
    return m;
}

std::vector<double> circulant_spectrum(std::size_t d) {
    std::vector<double> s(d);
    for (std::size_t j = 0; j < d; ++j) {
        s[j] = std::sqrt(2.0 - 2.0 * std::cos(2.0 * M_PI * static_cast<double>(j) / d));
    }
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

}  // namespace

TEST_CASE("singular spectrum of simple matrices") {
    const auto diag = DenseMatrix::diagonal(std::vector<double>{3.0, 4.0});
    const auto s = singular_spectrum(diag);
    REQUIRE(s.values.size() == 2);
    CHECK(s.values[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(s.values[1] == doctest::Approx(3.0).epsilon(1e-14));

    const DenseMatrix zero(2, 2);
    const auto sz = singular_spectrum(zero);
    CHECK(sz.values[0] == 0.0);
    CHECK(sz.values[1] == 0.0);
    CHECK(sz.numerical_rank() == 0);
}

TEST_CASE("circulant cycle spectrum matches the closed form") {
    for (std::size_t d : {3, 4, 7, 12}) {
        const auto spectrum = singular_spectrum(cycle_circulant(d));
        const auto expected = circulant_spectrum(d);
        REQUIRE(spectrum.values.size() == d);
        for (std::size_t j = 0; j < d; ++j) {
            CHECK(spectrum.values[j] == doctest::Approx(expected[j]).epsilon(1e-11));
        }
    }
    // D = 4: sigma^2 values {0, 2, 4, 2} -> spectrum (2, sqrt2, sqrt2, 0).
    const auto s4 = singular_spectrum(cycle_circulant(4));
    CHECK(s4.values[0] == doctest::Approx(2.0));
    CHECK(s4.values[1] == doctest::Approx(std::sqrt(2.0)));
    CHECK(s4.values[2] == doctest::Approx(std::sqrt(2.0)));
    CHECK(s4.values[3] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("singular spectrum rejects bad input") {
    DenseMatrix bad(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((void)singular_spectrum(bad), bulkjl::input_error);
    CHECK_THROWS_AS((void)singular_spectrum(DenseMatrix()), bulkjl::input_error);
}

TEST_CASE("stable ranks of reference matrices") {
    const auto ranks = stable_ranks(DenseMatrix::diagonal(std::vector<double>{3.0, 4.0}));
    CHECK(ranks.r_inf == doctest::Approx(25.0 / 16.0).epsilon(1e-13));
    CHECK(ranks.r_4 == doctest::Approx(625.0 / 337.0).epsilon(1e-13));

    for (std::size_t d : {2, 5, 16}) {
        const auto rid = stable_ranks(DenseMatrix::identity(d));
        CHECK(rid.r_inf == doctest::Approx(static_cast<double>(d)).epsilon(1e-12));
        CHECK(rid.r_4 == doctest::Approx(static_cast<double>(d)).epsilon(1e-12));
    }

    // Cycle circulant, D = 4: r_inf = 2D/4 = D/2.
    CHECK(stable_ranks(cycle_circulant(4)).r_inf == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS((void)stable_ranks(DenseMatrix(3, 3)), bulkjl::input_error);
}

TEST_CASE("stable rank chain 1 <= r_inf <= r_4 <= rank <= min(dims)") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t rows = 2 + seed % 7;
        const std::size_t cols = 2 + (seed * 3) % 9;
        const auto a = random_matrix(rows, cols, 1000 + seed);
        const auto spectrum = singular_spectrum(a);
        const auto ranks = stable_ranks(spectrum);
        CHECK(ranks.r_inf >= 1.0);
        CHECK(ranks.r_4 >= ranks.r_inf * (1.0 - 1e-12));
        CHECK(ranks.r_4 <= static_cast<double>(spectrum.numerical_rank()) * (1.0 + 1e-12));
        CHECK(ranks.r_4 <= static_cast<double>(std::min(rows, cols)) * (1.0 + 1e-12));
    }
}

TEST_CASE("stable ranks are scale invariant") {
    const auto a = random_matrix(6, 9, 77);
    DenseMatrix scaled = a;
    for (std::size_t i = 0; i < scaled.rows() * scaled.cols(); ++i) scaled.data()[i] *= -37.5;
    const auto ra = stable_ranks(a);
    const auto rs = stable_ranks(scaled);
    CHECK(rs.r_inf == doctest::Approx(ra.r_inf).epsilon(1e-12));
    CHECK(rs.r_4 == doctest::Approx(ra.r_4).epsilon(1e-12));
}

TEST_CASE("frobenius norm agrees between entries and spectrum") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto a = random_matrix(5 + seed % 3, 7, 500 + seed);
        const double from_entries = a.frobenius_sq();
        const double from_spectrum = singular_spectrum(a).frobenius_sq();
        CHECK(from_spectrum == doctest::Approx(from_entries).epsilon(1e-9));
    }
}

TEST_CASE("column subset stable rank bound (constant-norm columns)") {
    const bulkjl::rng::Philox gen(4242);
    std::uint64_t counter = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t d = 3 + trial % 6;
        const std::size_t m_cols = 4 + trial % 8;
        DenseMatrix a(d, m_cols);
        for (std::size_t c = 0; c < m_cols; ++c) {
            double norm_sq = 0.0;
            for (std::size_t r = 0; r < d; ++r) {
                a(r, c) = gen.gaussian_at(counter++);
                norm_sq += a(r, c) * a(r, c);
            }
            for (std::size_t r = 0; r < d; ++r) a(r, c) *= 2.0 / std::sqrt(norm_sq);
        }
        const double r_full = stable_ranks(a).r_inf;
        for (std::size_t start = 0; start < m_cols; ++start) {
            for (std::size_t len = 1; start + len <= m_cols; ++len) {
                DenseMatrix b(d, len);
                for (std::size_t c = 0; c < len; ++c) {
                    for (std::size_t r = 0; r < d; ++r) b(r, c) = a(r, start + c);
                }
                const double lower =
                    std::max(static_cast<double>(len) / m_cols * r_full, 1.0);
                CHECK(stable_ranks(b).r_inf >= lower * (1.0 - 1e-12));
            }
        }
    }
}

TEST_CASE("star batch has stable rank at most 2") {
    for (std::size_t m : {4, 16, 64}) {
        const std::size_t d = m + 1;
        DenseMatrix star(d, m);
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (std::size_t c = 0; c < m; ++c) {
            star(c + 1, c) = inv_sqrt2;
            star(0, c) = -inv_sqrt2;
        }
        CHECK(stable_ranks(star).r_inf <= 2.0 + 1e-12);
    }
}

TEST_CASE("intrinsic dimension") {
    CHECK(intrinsic_dimension(DenseMatrix::identity(7)) == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(intrinsic_dimension(DenseMatrix::diagonal(std::vector<double>{1, 0, 0, 0})) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(intrinsic_dimension(DenseMatrix::diagonal(std::vector<double>{2, 1, 1})) ==
          doctest::Approx(2.0).epsilon(1e-12));

    // Invariant under positive scaling.
    const auto sigma = random_psd(6, 9);
    DenseMatrix scaled = sigma;
    for (std::size_t i = 0; i < 36; ++i) scaled.data()[i] *= 4.25;
    CHECK(intrinsic_dimension(scaled) ==
          doctest::Approx(intrinsic_dimension(sigma)).epsilon(1e-12));

    DenseMatrix asym(2, 2);
    asym(0, 0) = 1.0;
    asym(0, 1) = 0.5;
    asym(1, 0) = -0.5;
    asym(1, 1) = 1.0;
    CHECK_THROWS_AS((void)intrinsic_dimension(asym), bulkjl::input_error);
    CHECK_THROWS_AS((void)intrinsic_dimension(DenseMatrix::diagonal(std::vector<double>{1, -1})),
                    bulkjl::input_error);
}

TEST_CASE("top eigenvalue by power iteration") {
    CHECK(top_eigenvalue(DenseMatrix::diagonal(std::vector<double>{5, 1}), 1e-10) ==
          doctest::Approx(5.0).epsilon(5e-10));
    // Flat spectrum converges on the first step.
    CHECK(top_eigenvalue(DenseMatrix::identity(3), 1e-12) == doctest::Approx(1.0));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto sigma = random_psd(8, 2000 + seed);
        const double expected = oracles::top_eigenvalue_oracle(sigma);
        CHECK(top_eigenvalue(sigma, 1e-10) == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("top eigenvalue survives an all-ones start orthogonal to the top eigenspace") {
    // Eigenvectors (1,1)/sqrt2 with eigenvalue 1 and (1,-1)/sqrt2 with
    // eigenvalue 1 + 2a; the all-ones start sits exactly on the smaller one.
    const double a = 0.4;
    DenseMatrix m(2, 2);
    m(0, 0) = 1.0 + a;
    m(0, 1) = -a;
    m(1, 0) = -a;
    m(1, 1) = 1.0 + a;
    CHECK(top_eigenvalue(m, 1e-10) == doctest::Approx(1.0 + 2.0 * a).epsilon(1e-8));
}

TEST_CASE("top eigenvalue of the zero matrix is zero") {
    CHECK(top_eigenvalue(DenseMatrix(4, 4), 1e-10) == doctest::Approx(0.0));
}

TEST_CASE("top eigenvalue reports non-convergence with its best estimate") {
    // Gap 5e-5 with tol 1e-15: neither the residual certificate nor the
    // value plateau can trigger within the iteration cap.
    const auto slow = DenseMatrix::diagonal(std::vector<double>{1.0, 1.0 - 5e-5, 0.5, 0.25});
    try {
        (void)top_eigenvalue(slow, 1e-15);
        FAIL("expected numeric_error");
    } catch (const bulkjl::numeric_error& e) {
        CHECK(e.best_estimate() > 0.5);
        CHECK(e.best_estimate() <= 1.0 + 1e-12);  // Rayleigh never overshoots
    }
}

TEST_CASE("symmetric operator norm handles indefinite matrices") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        DenseMatrix b = random_matrix(7, 7, 3000 + seed);
        // Symmetrize.
        for (std::size_t i = 0; i < 7; ++i) {
            for (std::size_t j = i + 1; j < 7; ++j) {
                const double v = 0.5 * (b(i, j) + b(j, i));
                b(i, j) = v;
                b(j, i) = v;
            }
        }
        const double expected = oracles::operator_norm_oracle(b);
        CHECK(operator_norm_symmetric(b, 1e-8) == doctest::Approx(expected).epsilon(1e-5));
    }
}

TEST_CASE("matmul shapes and errors") {
    const auto a = random_matrix(3, 4, 1);
    const auto b = random_matrix(4, 2, 2);
    const auto c = matmul(a, b);
    CHECK(c.rows() == 3);
    CHECK(c.cols() == 2);
    CHECK_THROWS_AS((void)matmul(b, a), bulkjl::input_error);
    const auto d = matmul_nt(a, random_matrix(5, 4, 3));
    CHECK(d.rows() == 3);
    CHECK(d.cols() == 5);
}
