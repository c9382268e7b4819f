// Compiled with -mavx2; only reached after a runtime CPU check.
#if defined(__x86_64__) || defined(_M_X64)

#include "kgmotive/kernels.hpp"

#include <immintrin.h>

namespace kgmotive::kernels {

double sum_log2_factorial_avx2(std::span<const uint32_t> xs) {
    const auto table = log2_factorial_table();
    const double* t = table.data();
    const int n = int(xs.size());
    const uint32_t* p = xs.data();
    const __m256i limit = _mm256_set1_epi32(int(table.size()));

    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    double spill = 0.0;

    int i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256i idx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
        // Unsigned x < limit, via the signed-min trick.
        __m256i clamped = _mm256_min_epu32(idx, _mm256_sub_epi32(limit, _mm256_set1_epi32(1)));
        __m256i in_range = _mm256_cmpeq_epi32(clamped, idx);
        if (_mm256_movemask_epi8(in_range) == -1) {
            acc0 = _mm256_add_pd(acc0, _mm256_i32gather_pd(t, _mm256_castsi256_si128(idx), 8));
            acc1 = _mm256_add_pd(acc1, _mm256_i32gather_pd(t, _mm256_extracti128_si256(idx, 1), 8));
        } else {
            for (int j = 0; j < 8; ++j) spill += log2_factorial(p[i + j]);
        }
    }
    for (; i < n; ++i) spill += log2_factorial(p[i]);

    __m256d acc = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d sum2 = _mm_add_pd(lo, hi);
    __m128d sum1 = _mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2));
    return _mm_cvtsd_f64(sum1) + spill;
}

} // namespace kgmotive::kernels

#endif
