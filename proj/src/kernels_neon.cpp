#include "bulkjl/kernels.hpp"

#if defined(BULKJL_HAVE_NEON_BUILD)

#include <arm_neon.h>

// NEON variants (2 doubles per lane pair, fused multiply-add).

namespace bulkjl::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t s0 = vdupq_n_f64(0.0);
    float64x2_t s1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 = vfmaq_f64(s0, vld1q_f64(a + i), vld1q_f64(b + i));
        s1 = vfmaq_f64(s1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(s0) + vaddvq_f64(s1);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_sq(const double* a, std::size_t n) {
    float64x2_t s0 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t x = vld1q_f64(a + i);
        s0 = vfmaq_f64(s0, x, x);
    }
    double s = vaddvq_f64(s0);
    for (; i < n; ++i) s += a[i] * a[i];
    return s;
}

double sqdist(const double* a, const double* b, std::size_t n) {
    float64x2_t s0 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        s0 = vfmaq_f64(s0, d, d);
    }
    double s = vaddvq_f64(s0);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) x[i] *= alpha;
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n) {
    for (std::size_t i = 0; i < r; ++i) {
        const double* ai = a + i * m;
        double* ci = c + i * n;
        for (std::size_t l = 0; l < m; ++l) {
            axpy(ai[l], b + l * n, ci, n);
        }
    }
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n) {
    for (std::size_t i = 0; i < r; ++i) {
        const double* ai = a + i * m;
        double* ci = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            ci[j] += dot(ai, b + j * m, m);
        }
    }
}

}  // namespace bulkjl::kernels::neon

#endif  // BULKJL_HAVE_NEON_BUILD
