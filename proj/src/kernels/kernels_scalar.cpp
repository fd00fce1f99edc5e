#include "kernels_impl.hpp"

namespace steinbias::kernels::scalar {

void squared_affine(double offset, const double* const* rows, const double* coefs, std::size_t row_count,
                    double* out, std::size_t len) {
    for (std::size_t l = 0; l < len; ++l) {
        double v = offset;
        for (std::size_t r = 0; r < row_count; ++r) v += coefs[r] * rows[r][l];
        out[l] = v * v;
    }
}

double gather_sum(const double* a, std::size_t n, const std::uint32_t* perm) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i * n + perm[i]];
    return s;
}

SumPair sum_and_squares(const double* x, std::size_t len) {
    SumPair out;
    for (std::size_t i = 0; i < len; ++i) {
        out.sum += x[i];
        out.sum_sq += x[i] * x[i];
    }
    return out;
}

SumPair paired_difference(const double* lhs, const double* rhs, double scale, std::size_t len) {
    SumPair out;
    for (std::size_t i = 0; i < len; ++i) {
        const double d = lhs[i] - scale * rhs[i];
        out.sum += d;
        out.sum_sq += d * d;
    }
    return out;
}

}  // namespace steinbias::kernels::scalar
