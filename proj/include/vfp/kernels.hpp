#pragma once

#include <cstddef>

namespace vfp::kernels {

// Data-parallel inner loops used by the algebra, estimation and LP layers.
// Every entry has a scalar reference implementation plus SIMD variants
// (AVX2 on x86-64, NEON on aarch64) selected once at startup. SIMD variants
// must agree with the scalar reference within the tolerances asserted by
// tests/test_kernels.cpp; they are not required to be bit-identical because
// of FMA contraction and the vectorized log.
struct Kernels {
    const char* name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    // y[i] += alpha * x[i]
    void (*axpy)(double* y, const double* x, double alpha, std::size_t n);

    // x[i] *= alpha
    void (*scale)(double* x, double alpha, std::size_t n);

    // sum over rows r and columns c of p[r*cols+c] * q[r*cols+c] * w[c]
    double (*weighted_dot)(const double* p, const double* q, const double* w,
                           std::size_t rows, std::size_t cols);

    // Batched Bernoulli-KL confidence bounds, one independent bisection per
    // element. n is read with stride n_stride (0 broadcasts n[0]).
    //   lower: out[i] = min { g in [0, mu[i]] : n_i * D(mu[i], g) <= ln_t }
    //   upper: out[i] = max { g in [mu[i], 1] : n_i * D(mu[i], g) <= ln_t }
    // Conventions: n_i <= 0 gives 0 (lower) / 1 (upper); ln_t <= 0 gives
    // mu[i]; mu is clamped to [0,1]. Absolute tolerance 1e-9 (30 halvings
    // of an interval of width at most 1).
    void (*kl_lower)(const double* mu, const double* n, std::size_t n_stride,
                     double ln_t, double* out, std::size_t count);
    void (*kl_upper)(const double* mu, const double* n, std::size_t n_stride,
                     double ln_t, double* out, std::size_t count);
};

// Reference implementation, always available.
const Kernels& scalar();

// SIMD variants; nullptr when the build or the CPU does not support them.
const Kernels* avx2();
const Kernels* neon();

// Variant used by the library. Picks the best supported SIMD variant, or
// honors VFP_KERNELS=scalar|avx2|neon (falls back to scalar with a warning
// on stderr if the requested variant is unavailable). Resolved once.
const Kernels& active();

}  // namespace vfp::kernels
