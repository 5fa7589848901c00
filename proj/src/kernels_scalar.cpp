#include "vfp/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace vfp::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double* y, const double* x, double alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double* x, double alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double weighted_dot_scalar(const double* p, const double* q, const double* w,
                           std::size_t rows, std::size_t cols) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* pr = p + r * cols;
        const double* qr = q + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += pr[c] * qr[c] * w[c];
    }
    return acc;
}

// Bernoulli relative entropy D(mu, g) for g in (0,1), with 0*log(0) := 0.
double kl_div(double mu, double g) {
    double d = 0.0;
    if (mu > 0.0) d += mu * std::log(mu / g);
    if (mu < 1.0) d += (1.0 - mu) * std::log((1.0 - mu) / (1.0 - g));
    return d;
}

// 30 halvings of an interval of width <= 1 land within 1e-9 of the
// boundary of { g : n * D(mu, g) <= ln_t }. The iteration count is fixed
// so scalar and SIMD paths walk the same sequence of midpoints.
constexpr int kBisectIters = 30;

double kl_lower_one(double mu, double n, double ln_t) {
    mu = std::clamp(mu, 0.0, 1.0);
    if (n <= 0.0 || mu <= 0.0) return 0.0;
    if (ln_t <= 0.0) return mu;
    double lo = 0.0, hi = mu;  // condition always holds at hi
    for (int it = 0; it < kBisectIters; ++it) {
        double mid = 0.5 * (lo + hi);
        if (n * kl_div(mu, mid) <= ln_t)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double kl_upper_one(double mu, double n, double ln_t) {
    mu = std::clamp(mu, 0.0, 1.0);
    if (n <= 0.0 || mu >= 1.0) return 1.0;
    if (ln_t <= 0.0) return mu;
    double lo = mu, hi = 1.0;  // condition always holds at lo
    for (int it = 0; it < kBisectIters; ++it) {
        double mid = 0.5 * (lo + hi);
        if (n * kl_div(mu, mid) <= ln_t)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

void kl_lower_scalar(const double* mu, const double* n, std::size_t n_stride,
                     double ln_t, double* out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i)
        out[i] = kl_lower_one(mu[i], n[i * n_stride], ln_t);
}

void kl_upper_scalar(const double* mu, const double* n, std::size_t n_stride,
                     double ln_t, double* out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i)
        out[i] = kl_upper_one(mu[i], n[i * n_stride], ln_t);
}

}  // namespace

const Kernels& scalar() {
    static const Kernels k = {
        "scalar",    dot_scalar,      axpy_scalar,     scale_scalar,
        weighted_dot_scalar, kl_lower_scalar, kl_upper_scalar,
    };
    return k;
}

}  // namespace vfp::kernels
