#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace steinbias::kernels {

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& scalar_table() noexcept {
    static const KernelTable table{Isa::scalar, scalar::squared_affine, scalar::gather_sum, scalar::sum_and_squares,
                                   scalar::paired_difference};
    return table;
}

const KernelTable* avx2_table() noexcept {
#if STEINBIAS_HAVE_AVX2
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    static const KernelTable table{Isa::avx2, avx2::squared_affine, avx2::gather_sum, avx2::sum_and_squares,
                                   avx2::paired_difference};
    return supported ? &table : nullptr;
#else
    return nullptr;
#endif
}

namespace {

const KernelTable& select() noexcept {
    const char* forced = std::getenv("STEINBIAS_ISA");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
}

}  // namespace

const KernelTable& active() noexcept {
    static const KernelTable& table = select();
    return table;
}

}  // namespace steinbias::kernels
