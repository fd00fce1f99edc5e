// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace steinbias::kernels::avx2 {

namespace {

inline double horizontal_sum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void squared_affine(double offset, const double* const* rows, const double* coefs, std::size_t row_count,
                    double* out, std::size_t len) {
    const __m256d base = _mm256_set1_pd(offset);
    std::size_t l = 0;
    for (; l + 4 <= len; l += 4) {
        __m256d v = base;
        for (std::size_t r = 0; r < row_count; ++r) {
            v = _mm256_fmadd_pd(_mm256_set1_pd(coefs[r]), _mm256_loadu_pd(rows[r] + l), v);
        }
        _mm256_storeu_pd(out + l, _mm256_mul_pd(v, v));
    }
    for (; l < len; ++l) {
        double v = offset;
        for (std::size_t r = 0; r < row_count; ++r) v += coefs[r] * rows[r][l];
        out[l] = v * v;
    }
}

double gather_sum(const double* a, std::size_t n, const std::uint32_t* perm) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    if (n * n < (std::size_t{1} << 31)) {
        const __m128i stride = _mm_set_epi32(3, 2, 1, 0);
        for (; i + 4 <= n; i += 4) {
            const __m128i cols = _mm_loadu_si128(reinterpret_cast<const __m128i*>(perm + i));
            const __m128i rows = _mm_mullo_epi32(_mm_add_epi32(_mm_set1_epi32(static_cast<int>(i)), stride),
                                                 _mm_set1_epi32(static_cast<int>(n)));
            const __m128i idx = _mm_add_epi32(rows, cols);
            acc = _mm256_add_pd(acc, _mm256_i32gather_pd(a, idx, 8));
        }
    }
    double s = horizontal_sum(acc);
    for (; i < n; ++i) s += a[i * n + perm[i]];
    return s;
}

SumPair sum_and_squares(const double* x, std::size_t len) {
    __m256d s = _mm256_setzero_pd();
    __m256d q = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        s = _mm256_add_pd(s, v);
        q = _mm256_fmadd_pd(v, v, q);
    }
    SumPair out{horizontal_sum(s), horizontal_sum(q)};
    for (; i < len; ++i) {
        out.sum += x[i];
        out.sum_sq += x[i] * x[i];
    }
    return out;
}

SumPair paired_difference(const double* lhs, const double* rhs, double scale, std::size_t len) {
    const __m256d k = _mm256_set1_pd(scale);
    __m256d s = _mm256_setzero_pd();
    __m256d q = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        const __m256d d = _mm256_fnmadd_pd(k, _mm256_loadu_pd(rhs + i), _mm256_loadu_pd(lhs + i));
        s = _mm256_add_pd(s, d);
        q = _mm256_fmadd_pd(d, d, q);
    }
    SumPair out{horizontal_sum(s), horizontal_sum(q)};
    for (; i < len; ++i) {
        const double d = lhs[i] - scale * rhs[i];
        out.sum += d;
        out.sum_sq += d * d;
    }
    return out;
}

}  // namespace steinbias::kernels::avx2
