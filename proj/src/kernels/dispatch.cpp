#include "projlab/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace projlab::kernels {

#ifdef PROJLAB_HAVE_AVX2
const Backend* avx2_backend_impl();
#endif

const Backend* avx2_backend() {
#ifdef PROJLAB_HAVE_AVX2
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_backend_impl();
#endif
    return nullptr;
}

namespace {

const Backend& pick() {
    const char* force = std::getenv("PROJLAB_KERNELS");
    if (force != nullptr && std::strcmp(force, "scalar") == 0) return scalar_backend();
    const Backend* simd = avx2_backend();
    if (force != nullptr && std::strcmp(force, "avx2") == 0 && simd == nullptr)
        return scalar_backend();
    return simd != nullptr ? *simd : scalar_backend();
}

} // namespace

const Backend& active() {
    static const Backend& chosen = pick();
    return chosen;
}

} // namespace projlab::kernels
