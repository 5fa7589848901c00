// AVX2/FMA kernel variants. Compiled only when the toolchain accepts
// -mavx2 -mfma; runtime CPU support is checked in kernels_dispatch.cpp.

#include "vfp/kernels.hpp"

#if defined(VFP_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace vfp::kernels {
namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc0 = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm_add_pd(_mm256_castpd256_pd128(acc0), _mm256_extractf128_pd(acc0, 1));
    double acc = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double* y, const double* x, double alpha, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double* x, double alpha, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

double weighted_dot_avx2(const double* p, const double* q, const double* w,
                         std::size_t rows, std::size_t cols) {
    __m256d acc = _mm256_setzero_pd();
    double tail = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* pr = p + r * cols;
        const double* qr = q + r * cols;
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d pq = _mm256_mul_pd(_mm256_loadu_pd(pr + c), _mm256_loadu_pd(qr + c));
            acc = _mm256_fmadd_pd(pq, _mm256_loadu_pd(w + c), acc);
        }
        for (; c < cols; ++c) tail += pr[c] * qr[c] * w[c];
    }
    __m128d lo = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    return tail + _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// ---------------------------------------------------------------------------
// Vectorized natural log (Cephes polynomial), valid for positive normal
// inputs. Lanes holding non-positive values produce garbage; callers must
// blend those lanes away afterwards.

__m256d log4_pd(__m256d x) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);

    // frexp: x = m * 2^e with m in [0.5, 1)
    __m256i bits = _mm256_castpd_si256(x);
    __m256i exp_raw = _mm256_srli_epi64(bits, 52);
    exp_raw = _mm256_and_si256(exp_raw, _mm256_set1_epi64x(0x7FF));
    // int64 -> double for small nonnegative ints: OR into 2^52, subtract
    __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_raw, magic)),
                              _mm256_set1_pd(4503599627370496.0 + 1022.0));
    __m256i mant = _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL));
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(mant, _mm256_set1_epi64x(0x3FE0000000000000LL)));

    // if m < sqrt(1/2): m = 2m, e -= 1; then z = m - 1 in [sqrt1_2-1, sqrt2-1]
    __m256d below = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
    m = _mm256_blendv_pd(m, _mm256_add_pd(m, m), below);
    e = _mm256_add_pd(e, _mm256_and_pd(below, _mm256_set1_pd(-1.0)));
    __m256d z = _mm256_sub_pd(m, one);

    // log(1+z) = z - z^2/2 + z^3 * P(z)/Q(z)
    __m256d p = _mm256_set1_pd(1.01875663804580931796e-4);
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.97494994976747001425e-1));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(4.70579119878881725854e0));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.44989225341610930846e1));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(1.79368678507819816313e1));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(7.70838733755885391666e0));
    __m256d q = _mm256_add_pd(z, _mm256_set1_pd(1.12873587189167450590e1));
    q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(4.52279145837532221105e1));
    q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(8.29875266912776603211e1));
    q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(7.11544750618563894466e1));
    q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.31251620126765340583e1));

    __m256d z2 = _mm256_mul_pd(z, z);
    __m256d y = _mm256_mul_pd(_mm256_mul_pd(z, z2), _mm256_div_pd(p, q));
    // ln2 split into hi+lo keeps e*ln2 exact to double precision
    y = _mm256_fmadd_pd(e, _mm256_set1_pd(-2.121944400546905827679e-4), y);
    y = _mm256_fnmadd_pd(half, z2, y);
    y = _mm256_add_pd(y, z);
    return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), y);
}

// D(mu, g) with per-lane handling of mu = 0 and mu = 1.
__m256d kl_div4(__m256d mu, __m256d one_minus_mu, __m256d g) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d t1 = _mm256_mul_pd(mu, log4_pd(_mm256_div_pd(mu, g)));
    __m256d t2 = _mm256_mul_pd(
        one_minus_mu, log4_pd(_mm256_div_pd(one_minus_mu, _mm256_sub_pd(one, g))));
    t1 = _mm256_blendv_pd(t1, zero, _mm256_cmp_pd(mu, zero, _CMP_LE_OQ));
    t2 = _mm256_blendv_pd(t2, zero, _mm256_cmp_pd(one_minus_mu, zero, _CMP_LE_OQ));
    return _mm256_add_pd(t1, t2);
}

constexpr int kBisectIters = 30;

template <bool Lower>
void kl_batch_avx2(const double* mu_in, const double* n_in, std::size_t n_stride,
                   double ln_t, double* out, std::size_t count) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d vlnt = _mm256_set1_pd(ln_t);
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        __m256d mu = _mm256_loadu_pd(mu_in + i);
        mu = _mm256_min_pd(one, _mm256_max_pd(zero, mu));
        __m256d n = n_stride == 0
                        ? _mm256_set1_pd(n_in[0])
                        : _mm256_setr_pd(n_in[(i + 0) * n_stride], n_in[(i + 1) * n_stride],
                                         n_in[(i + 2) * n_stride], n_in[(i + 3) * n_stride]);
        __m256d omm = _mm256_sub_pd(one, mu);
        __m256d lo = Lower ? zero : mu;
        __m256d hi = Lower ? mu : one;
        for (int it = 0; it < kBisectIters; ++it) {
            __m256d mid = _mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_add_pd(lo, hi));
            __m256d nd = _mm256_mul_pd(n, kl_div4(mu, omm, mid));
            __m256d ok = _mm256_cmp_pd(nd, vlnt, _CMP_LE_OQ);
            if (Lower) {
                hi = _mm256_blendv_pd(hi, mid, ok);
                lo = _mm256_blendv_pd(mid, lo, ok);
            } else {
                lo = _mm256_blendv_pd(lo, mid, ok);
                hi = _mm256_blendv_pd(mid, hi, ok);
            }
        }
        __m256d res = Lower ? hi : lo;
        // specials, applied in the same priority order as the scalar path
        if (ln_t <= 0.0) res = mu;
        __m256d degenerate =
            Lower ? _mm256_cmp_pd(mu, zero, _CMP_LE_OQ) : _mm256_cmp_pd(mu, one, _CMP_GE_OQ);
        degenerate = _mm256_or_pd(degenerate, _mm256_cmp_pd(n, zero, _CMP_LE_OQ));
        res = _mm256_blendv_pd(res, Lower ? zero : one, degenerate);
        _mm256_storeu_pd(out + i, res);
    }
    if (i < count) {
        const Kernels& ref = scalar();
        auto fn = Lower ? ref.kl_lower : ref.kl_upper;
        fn(mu_in + i, n_in + i * n_stride, n_stride, ln_t, out + i, count - i);
    }
}

}  // namespace

const Kernels* avx2() {
    static const Kernels k = {
        "avx2",            dot_avx2,           axpy_avx2,          scale_avx2,
        weighted_dot_avx2, kl_batch_avx2<true>, kl_batch_avx2<false>,
    };
    return &k;
}

}  // namespace vfp::kernels

#else

namespace vfp::kernels {
const Kernels* avx2() { return nullptr; }
}  // namespace vfp::kernels

#endif  // VFP_HAVE_AVX2
