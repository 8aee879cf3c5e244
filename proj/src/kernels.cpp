#include "way/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace way::kernels {

bool cpu_has_avx2() {
#if defined(__GNUC__) && defined(__x86_64__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const Ops* select() {
    const char* env = std::getenv("WAY_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return &scalar_ops;
#if defined(WAY_BUILD_AVX2)
    if (env && std::strcmp(env, "avx2") == 0) return &avx2_ops;
    if (cpu_has_avx2()) return &avx2_ops;
#endif
    return &scalar_ops;
}

}  // namespace

const Ops& ops() {
    static const Ops* active = select();
    return *active;
}

}  // namespace way::kernels
