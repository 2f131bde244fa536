#include <cstdlib>
#include <string_view>

#include "hvae/simd/kernels.hpp"

namespace hvae::simd {

#if defined(HVAE_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(HVAE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2_kernel_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& kernels() {
    static const KernelTable& selected = [] () -> const KernelTable& {
        const char* forced = std::getenv("HVAE_SIMD");
        if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
        if (const KernelTable* t = avx2_kernels()) return *t;
        return scalar_kernels();
    }();
    return selected;
}

}  // namespace hvae::simd
