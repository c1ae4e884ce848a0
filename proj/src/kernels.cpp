#include <nbar/kernels.hpp>

#include <cstdlib>
#include <cstring>

namespace nbar::kern {

#ifdef NBAR_HAVE_AVX2
const Kernels* avx2_kernels_impl();
#endif

const Kernels* avx2_kernels() {
#ifdef NBAR_HAVE_AVX2
    if (__builtin_cpu_supports("avx2")) return avx2_kernels_impl();
#endif
    return nullptr;
}

const Kernels& active_kernels() {
    static const Kernels* chosen = [] {
        const char* env = std::getenv("NBAR_KERNELS");
        if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
        if (const Kernels* k = avx2_kernels()) return k;
        return &scalar_kernels();
    }();
    return *chosen;
}

}  // namespace nbar::kern
