#include <immintrin.h>

#include "airkit/kernels.hpp"

namespace airkit::kernels {
namespace detail {

namespace {

void magnitude_squared_avx2(const double* iq, std::size_t count, double* out) {
    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
        const __m256d a = _mm256_loadu_pd(iq + 2 * k);      // r0 i0 r1 i1
        const __m256d b = _mm256_loadu_pd(iq + 2 * k + 4);  // r2 i2 r3 i3
        const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
        // h = |x0|^2 |x2|^2 |x1|^2 |x3|^2
        _mm256_storeu_pd(out + k, _mm256_permute4x64_pd(h, 0b11011000));
    }
    for (; k < count; ++k) {
        const double re = iq[2 * k];
        const double im = iq[2 * k + 1];
        out[k] = re * re + im * im;
    }
}

double sum_avx2(const double* v, std::size_t count) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v + i));
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    double total = _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
    for (; i < count; ++i) total += v[i];
    return total;
}

void clipped_level_avx2(const double* inverse, std::size_t count, double level, double* out) {
    const __m256d lv = _mm256_set1_pd(level);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
        const __m256d d = _mm256_sub_pd(lv, _mm256_loadu_pd(inverse + k));
        _mm256_storeu_pd(out + k, _mm256_max_pd(d, zero));
    }
    for (; k < count; ++k) {
        const double d = level - inverse[k];
        out[k] = d > 0.0 ? d : 0.0;
    }
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
    static const KernelTable table{Isa::Avx2, "avx2", &magnitude_squared_avx2, &sum_avx2,
                                   &clipped_level_avx2};
    return table;
}

}  // namespace detail
}  // namespace airkit::kernels
