#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2 version; the active table is picked once at startup from
// CPUID and can be pinned with STEINBIAS_ISA=scalar|avx2.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace steinbias::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

struct SumPair {
    double sum = 0.0;
    double sum_sq = 0.0;
};

/// Function table for one instruction set.
struct KernelTable {
    Isa isa;

    /// out[l] = (offset + sum_r coefs[r] * rows[r][l])^2 for l in [0, out.size()).
    void (*squared_affine)(double offset, const double* const* rows, const double* coefs,
                           std::size_t row_count, double* out, std::size_t len);

    /// sum_i a[i * n + perm[i]] for a row-major n x n array.
    double (*gather_sum)(const double* a, std::size_t n, const std::uint32_t* perm);

    /// Sum and sum of squares of x.
    SumPair (*sum_and_squares)(const double* x, std::size_t len);

    /// Sum and sum of squares of the paired differences lhs[i] - scale * rhs[i].
    SumPair (*paired_difference)(const double* lhs, const double* rhs, double scale, std::size_t len);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_table() noexcept;

/// Table selected at first use.
const KernelTable& active() noexcept;

// Convenience wrappers over active().
inline double gather_sum(std::span<const double> a, std::size_t n, std::span<const std::uint32_t> perm) {
    return active().gather_sum(a.data(), n, perm.data());
}
inline SumPair sum_and_squares(std::span<const double> x) { return active().sum_and_squares(x.data(), x.size()); }

}  // namespace steinbias::kernels
