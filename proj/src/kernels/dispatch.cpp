#include "kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <thread>
#include <vector>

namespace emdtn::kernels {

namespace {

const Impl* resolve(const char* forced) {
    if (forced != nullptr) {
        if (std::strcmp(forced, "scalar") == 0) return &scalar_impl();
#if defined(EMDTN_HAVE_AVX2_BUILD)
        if (std::strcmp(forced, "avx2") == 0) return avx2_impl_if_supported();
#endif
#if defined(EMDTN_HAVE_NEON_BUILD)
        if (std::strcmp(forced, "neon") == 0) return neon_impl();
#endif
        return nullptr;
    }
#if defined(EMDTN_HAVE_AVX2_BUILD)
    if (const Impl* impl = avx2_impl_if_supported()) return impl;
#endif
#if defined(EMDTN_HAVE_NEON_BUILD)
    return neon_impl();
#endif
    return &scalar_impl();
}

std::atomic<const Impl*> g_active{nullptr};

}  // namespace

const Impl& active() {
    const Impl* impl = g_active.load(std::memory_order_acquire);
    if (impl == nullptr) {
        impl = resolve(std::getenv("EMDTN_KERNEL"));
        if (impl == nullptr) impl = &scalar_impl();
        g_active.store(impl, std::memory_order_release);
    }
    return *impl;
}

bool select(const char* name) {
    const Impl* impl = resolve(name);
    if (impl == nullptr) return false;
    g_active.store(impl, std::memory_order_release);
    return true;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    std::size_t workers = jobs <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    if (workers == 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& t : threads) t.join();
}

}  // namespace emdtn::kernels
