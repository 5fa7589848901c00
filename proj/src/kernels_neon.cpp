// NEON (aarch64) kernel variants, mirroring the AVX2 implementations with
// two f64 lanes. NEON is baseline on aarch64 so there is no runtime check.

#include "vfp/kernels.hpp"

#if defined(VFP_HAVE_NEON)

#include <arm_neon.h>

#include <cstdint>

namespace vfp::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    for (; i + 2 <= n; i += 2)
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_neon(double* y, const double* x, double alpha, std::size_t n) {
    float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_neon(double* x, double alpha, std::size_t n) {
    float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

double weighted_dot_neon(const double* p, const double* q, const double* w,
                         std::size_t rows, std::size_t cols) {
    float64x2_t acc = vdupq_n_f64(0.0);
    double tail = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* pr = p + r * cols;
        const double* qr = q + r * cols;
        std::size_t c = 0;
        for (; c + 2 <= cols; c += 2) {
            float64x2_t pq = vmulq_f64(vld1q_f64(pr + c), vld1q_f64(qr + c));
            acc = vfmaq_f64(acc, pq, vld1q_f64(w + c));
        }
        for (; c < cols; ++c) tail += pr[c] * qr[c] * w[c];
    }
    return tail + vaddvq_f64(acc);
}

// Vectorized natural log (Cephes polynomial); positive normal inputs only.
float64x2_t log2_pd(float64x2_t x) {
    const float64x2_t one = vdupq_n_f64(1.0);

    uint64x2_t bits = vreinterpretq_u64_f64(x);
    uint64x2_t exp_raw = vandq_u64(vshrq_n_u64(bits, 52), vdupq_n_u64(0x7FF));
    float64x2_t e = vsubq_f64(vcvtq_f64_s64(vreinterpretq_s64_u64(exp_raw)),
                              vdupq_n_f64(1022.0));
    uint64x2_t mant = vandq_u64(bits, vdupq_n_u64(0x000FFFFFFFFFFFFFULL));
    float64x2_t m =
        vreinterpretq_f64_u64(vorrq_u64(mant, vdupq_n_u64(0x3FE0000000000000ULL)));

    uint64x2_t below = vcltq_f64(m, vdupq_n_f64(0.70710678118654752440));
    m = vbslq_f64(below, vaddq_f64(m, m), m);
    e = vbslq_f64(below, vsubq_f64(e, one), e);
    float64x2_t z = vsubq_f64(m, one);

    float64x2_t p = vdupq_n_f64(1.01875663804580931796e-4);
    p = vfmaq_f64(vdupq_n_f64(4.97494994976747001425e-1), p, z);
    p = vfmaq_f64(vdupq_n_f64(4.70579119878881725854e0), p, z);
    p = vfmaq_f64(vdupq_n_f64(1.44989225341610930846e1), p, z);
    p = vfmaq_f64(vdupq_n_f64(1.79368678507819816313e1), p, z);
    p = vfmaq_f64(vdupq_n_f64(7.70838733755885391666e0), p, z);
    float64x2_t q = vaddq_f64(z, vdupq_n_f64(1.12873587189167450590e1));
    q = vfmaq_f64(vdupq_n_f64(4.52279145837532221105e1), q, z);
    q = vfmaq_f64(vdupq_n_f64(8.29875266912776603211e1), q, z);
    q = vfmaq_f64(vdupq_n_f64(7.11544750618563894466e1), q, z);
    q = vfmaq_f64(vdupq_n_f64(2.31251620126765340583e1), q, z);

    float64x2_t z2 = vmulq_f64(z, z);
    float64x2_t y = vmulq_f64(vmulq_f64(z, z2), vdivq_f64(p, q));
    y = vfmaq_f64(y, e, vdupq_n_f64(-2.121944400546905827679e-4));
    y = vfmsq_f64(y, vdupq_n_f64(0.5), z2);
    y = vaddq_f64(y, z);
    return vfmaq_f64(y, e, vdupq_n_f64(0.693359375));
}

float64x2_t kl_div2(float64x2_t mu, float64x2_t omm, float64x2_t g) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    float64x2_t t1 = vmulq_f64(mu, log2_pd(vdivq_f64(mu, g)));
    float64x2_t t2 = vmulq_f64(omm, log2_pd(vdivq_f64(omm, vsubq_f64(one, g))));
    t1 = vbslq_f64(vcleq_f64(mu, zero), zero, t1);
    t2 = vbslq_f64(vcleq_f64(omm, zero), zero, t2);
    return vaddq_f64(t1, t2);
}

constexpr int kBisectIters = 30;

template <bool Lower>
void kl_batch_neon(const double* mu_in, const double* n_in, std::size_t n_stride,
                   double ln_t, double* out, std::size_t count) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t vlnt = vdupq_n_f64(ln_t);
    std::size_t i = 0;
    for (; i + 2 <= count; i += 2) {
        float64x2_t mu = vld1q_f64(mu_in + i);
        mu = vminq_f64(one, vmaxq_f64(zero, mu));
        double n0 = n_in[(i + 0) * n_stride];
        double n1 = n_in[(i + 1) * n_stride];
        float64x2_t n = vsetq_lane_f64(n1, vdupq_n_f64(n0), 1);
        float64x2_t omm = vsubq_f64(one, mu);
        float64x2_t lo = Lower ? zero : mu;
        float64x2_t hi = Lower ? mu : one;
        for (int it = 0; it < kBisectIters; ++it) {
            float64x2_t mid = vmulq_f64(vdupq_n_f64(0.5), vaddq_f64(lo, hi));
            float64x2_t nd = vmulq_f64(n, kl_div2(mu, omm, mid));
            uint64x2_t ok = vcleq_f64(nd, vlnt);
            if (Lower) {
                hi = vbslq_f64(ok, mid, hi);
                lo = vbslq_f64(ok, lo, mid);
            } else {
                lo = vbslq_f64(ok, mid, lo);
                hi = vbslq_f64(ok, hi, mid);
            }
        }
        float64x2_t res = Lower ? hi : lo;
        if (ln_t <= 0.0) res = mu;
        uint64x2_t degenerate = Lower ? vcleq_f64(mu, zero) : vcgeq_f64(mu, one);
        degenerate = vorrq_u64(degenerate, vcleq_f64(n, zero));
        res = vbslq_f64(degenerate, Lower ? zero : one, res);
        vst1q_f64(out + i, res);
    }
    if (i < count) {
        const Kernels& ref = scalar();
        auto fn = Lower ? ref.kl_lower : ref.kl_upper;
        fn(mu_in + i, n_in + i * n_stride, n_stride, ln_t, out + i, count - i);
    }
}

}  // namespace

const Kernels* neon() {
    static const Kernels k = {
        "neon",            dot_neon,            axpy_neon,           scale_neon,
        weighted_dot_neon, kl_batch_neon<true>, kl_batch_neon<false>,
    };
    return &k;
}

}  // namespace vfp::kernels

#else

namespace vfp::kernels {
const Kernels* neon() { return nullptr; }
}  // namespace vfp::kernels

#endif  // VFP_HAVE_NEON
