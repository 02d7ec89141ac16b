#include "bulkjl/kernels.hpp"

namespace bulkjl::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_sq(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
    return s;
}

double sqdist(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
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

}  // namespace bulkjl::kernels::scalar
