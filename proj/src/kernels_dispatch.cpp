#include "bulkjl/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "bulkjl/errors.hpp"

namespace bulkjl::kernels {

namespace {

struct Vtable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum_sq)(const double*, std::size_t);
    double (*sqdist)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    void (*gemm_nn)(const double*, const double*, double*, std::size_t, std::size_t, std::size_t);
    void (*gemm_nt)(const double*, const double*, double*, std::size_t, std::size_t, std::size_t);
};

constexpr Vtable kScalar{scalar::dot,  scalar::sum_sq,  scalar::sqdist, scalar::axpy,
                         scalar::scale, scalar::gemm_nn, scalar::gemm_nt};

#if defined(BULKJL_HAVE_AVX2_BUILD)
constexpr Vtable kAvx2{avx2::dot,  avx2::sum_sq,  avx2::sqdist, avx2::axpy,
                       avx2::scale, avx2::gemm_nn, avx2::gemm_nt};
#endif
#if defined(BULKJL_HAVE_NEON_BUILD)
constexpr Vtable kNeon{neon::dot,  neon::sum_sq,  neon::sqdist, neon::axpy,
                       neon::scale, neon::gemm_nn, neon::gemm_nt};
#endif

bool cpu_has_avx2_fma() {
#if defined(BULKJL_HAVE_AVX2_BUILD) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa best_available() {
#if defined(BULKJL_HAVE_NEON_BUILD)
    return Isa::neon;
#else
    if (cpu_has_avx2_fma()) return Isa::avx2;
    return Isa::scalar;
#endif
}

Isa resolve_from_env() {
    const char* env = std::getenv("BULKJL_SIMD");
    if (env == nullptr || std::strcmp(env, "auto") == 0 || env[0] == '\0') {
        return best_available();
    }
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0) {
        if (!cpu_has_avx2_fma()) throw input_error("BULKJL_SIMD=avx2 but CPU lacks AVX2+FMA");
        return Isa::avx2;
    }
    if (std::strcmp(env, "neon") == 0) {
#if defined(BULKJL_HAVE_NEON_BUILD)
        return Isa::neon;
#else
        throw input_error("BULKJL_SIMD=neon on a non-aarch64 build");
#endif
    }
    throw input_error(std::string("unknown BULKJL_SIMD value: ") + env);
}

const Vtable* table_for(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return &kScalar;
        case Isa::avx2:
#if defined(BULKJL_HAVE_AVX2_BUILD)
            return &kAvx2;
#else
            break;
#endif
        case Isa::neon:
#if defined(BULKJL_HAVE_NEON_BUILD)
            return &kNeon;
#else
            break;
#endif
    }
    return &kScalar;
}

std::atomic<const Vtable*> g_active{nullptr};
Isa g_isa = Isa::scalar;

const Vtable* active_table() {
    const Vtable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        const Isa isa = resolve_from_env();
        g_isa = isa;
        t = table_for(isa);
        g_active.store(t, std::memory_order_release);
    }
    return t;
}

}  // namespace

Isa active() {
    active_table();
    return g_isa;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "?";
}

void force_isa(Isa isa) {
    if (isa == Isa::avx2 && !cpu_has_avx2_fma()) {
        throw input_error("AVX2+FMA not available on this CPU");
    }
#if !defined(BULKJL_HAVE_NEON_BUILD)
    if (isa == Isa::neon) throw input_error("NEON not available in this build");
#endif
    g_isa = isa;
    g_active.store(table_for(isa), std::memory_order_release);
}

double dot(const double* a, const double* b, std::size_t n) { return active_table()->dot(a, b, n); }
double sum_sq(const double* a, std::size_t n) { return active_table()->sum_sq(a, n); }
double sqdist(const double* a, const double* b, std::size_t n) {
    return active_table()->sqdist(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active_table()->axpy(alpha, x, y, n);
}
void scale(double alpha, double* x, std::size_t n) { active_table()->scale(alpha, x, n); }
void gemm_nn(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n) {
    active_table()->gemm_nn(a, b, c, r, m, n);
}
void gemm_nt(const double* a, const double* b, double* c, std::size_t r, std::size_t m,
             std::size_t n) {
    active_table()->gemm_nt(a, b, c, r, m, n);
}

}  // namespace bulkjl::kernels
