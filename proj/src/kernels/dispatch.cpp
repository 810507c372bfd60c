#include <atomic>
#include <cstdlib>
#include <string_view>

#include "airkit/kernels.hpp"

namespace airkit::kernels {

#if defined(AIRKIT_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table_unchecked();
}
#endif

const KernelTable* avx2_table() {
#if defined(AIRKIT_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &detail::avx2_table_unchecked() : nullptr;
#else
    return nullptr;
#endif
}

namespace {

const KernelTable* detect() {
    const KernelTable* avx2 = avx2_table();
    if (const char* env = std::getenv("AIRKIT_SIMD")) {
        const std::string_view want(env);
        if (want == "scalar") return &scalar_table();
        if (want == "avx2" && avx2 != nullptr) return avx2;
    }
    return avx2 != nullptr ? avx2 : &scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& active() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        t = detect();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

std::string_view active_name() { return active().name; }

void force(Isa isa) {
    const KernelTable* t = &scalar_table();
    if (isa == Isa::Avx2 && avx2_table() != nullptr) t = avx2_table();
    g_active.store(t, std::memory_order_release);
}

}  // namespace airkit::kernels
