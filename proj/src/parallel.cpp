#include "steinbias/parallel.hpp"

namespace steinbias {

namespace {
std::atomic<std::size_t> g_threads{0};
}

std::size_t default_threads() noexcept {
    const std::size_t t = g_threads.load();
    if (t != 0) return t;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void set_default_threads(std::size_t threads) noexcept { g_threads.store(threads); }

}  // namespace steinbias
