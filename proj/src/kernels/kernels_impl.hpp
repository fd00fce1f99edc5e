#pragma once

#include "steinbias/kernels.hpp"

namespace steinbias::kernels {

namespace scalar {
void squared_affine(double offset, const double* const* rows, const double* coefs, std::size_t row_count,
                    double* out, std::size_t len);
double gather_sum(const double* a, std::size_t n, const std::uint32_t* perm);
SumPair sum_and_squares(const double* x, std::size_t len);
SumPair paired_difference(const double* lhs, const double* rhs, double scale, std::size_t len);
}  // namespace scalar

#if STEINBIAS_HAVE_AVX2
namespace avx2 {
void squared_affine(double offset, const double* const* rows, const double* coefs, std::size_t row_count,
                    double* out, std::size_t len);
double gather_sum(const double* a, std::size_t n, const std::uint32_t* perm);
SumPair sum_and_squares(const double* x, std::size_t len);
SumPair paired_difference(const double* lhs, const double* rhs, double scale, std::size_t len);
}  // namespace avx2
#endif

}  // namespace steinbias::kernels
