#include "vfp/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace vfp::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(VFP_HAVE_AVX2_BUILD) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Kernels& resolve() {
    const Kernels* best = &scalar();
    if (const Kernels* k = neon()) best = k;
    if (const Kernels* k = avx2(); k && cpu_has_avx2()) best = k;

    const char* want = std::getenv("VFP_KERNELS");
    if (!want || !*want || std::strcmp(want, "auto") == 0) return *best;
    if (std::strcmp(want, "scalar") == 0) return scalar();
    if (std::strcmp(want, "avx2") == 0) {
        if (const Kernels* k = avx2(); k && cpu_has_avx2()) return *k;
    } else if (std::strcmp(want, "neon") == 0) {
        if (const Kernels* k = neon()) return *k;
    }
    std::fprintf(stderr, "vfp: VFP_KERNELS=%s unavailable, using %s\n", want, best->name);
    return *best;
}

}  // namespace

const Kernels& active() {
    static const Kernels& k = resolve();
    return k;
}

}  // namespace vfp::kernels
