#pragma once

#include <cstddef>

// Data-parallel inner loops used by the dense-matrix, projection and
// estimation code. Every kernel has a scalar reference implementation and,
// where the hardware supports it, a SIMD variant (AVX2+FMA on x86-64, NEON
// on aarch64). The active implementation is chosen once at runtime; the
// BULKJL_SIMD environment variable ("scalar", "avx2", "neon", "auto")
// overrides the choice, which the equivalence tests use to compare variants.

namespace bulkjl::kernels {

enum class Isa { scalar, avx2, neon };

/// Instruction set selected for this process.
Isa active();
const char* isa_name(Isa isa);

/// Forces a specific implementation. Throws input_error if the requested
/// ISA is not available on this machine. Intended for tests and the CLI.
void force_isa(Isa isa);

// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i a[i]^2
double sum_sq(const double* a, std::size_t n);

// sum_i (a[i]-b[i])^2
double sqdist(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// x[i] *= alpha
void scale(double alpha, double* x, std::size_t n);

// C (r x n, row-major) += A (r x m, row-major) * B (m x n, row-major)
void gemm_nn(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n);

// C (r x n, row-major) += A (r x m, row-major) * B^T, B given n x m row-major
void gemm_nt(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n);

// Reference implementations, always available. The dispatcher and the
// equivalence tests both point at these.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum_sq(const double* a, std::size_t n);
double sqdist(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void gemm_nn(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n);
void gemm_nt(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define BULKJL_HAVE_AVX2_BUILD 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum_sq(const double* a, std::size_t n);
double sqdist(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void gemm_nn(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n);
void gemm_nt(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define BULKJL_HAVE_NEON_BUILD 1
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double sum_sq(const double* a, std::size_t n);
double sqdist(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void gemm_nn(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n);
void gemm_nt(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n);
}  // namespace neon
#endif

}  // namespace bulkjl::kernels
