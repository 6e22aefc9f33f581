#include "hardy/kernels.hpp"

namespace hardy::kernels {

#ifdef HARDY_HAVE_AVX2
const Table* avx2_table();
#endif

const Table* avx2() {
#ifdef HARDY_HAVE_AVX2
    return avx2_table();
#else
    return nullptr;
#endif
}

const Table& active() {
    static const Table* chosen = [] {
#ifdef HARDY_HAVE_AVX2
        __builtin_cpu_init();
        if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return avx2_table();
#endif
        return &scalar();
    }();
    return *chosen;
}

} // namespace hardy::kernels
