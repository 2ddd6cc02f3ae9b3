// SPDX-License-Identifier: Apache-2.0
// AVX2 variants. Compiled with per-function target attributes so the rest of
// the library stays baseline x86-64; only called after a runtime CPU check.
#include "rissim/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define RISSIM_AVX2 __attribute__((target("avx2,fma")))
#define RISSIM_HAVE_AVX2_TU 1
#endif

namespace rissim::kernels::avx2 {

#ifdef RISSIM_HAVE_AVX2_TU

// Two complex numbers per 256-bit register, stored as [re0 im0 re1 im1].

RISSIM_AVX2 void align_phases(const cd *b, const cd *fallback, cd *out, std::size_t n) {
    const double *pb = reinterpret_cast<const double *>(b);
    double *po = reinterpret_cast<double *>(out);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one_re = _mm256_setr_pd(1.0, 0.0, 1.0, 0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(pb + 2 * i);
        const __m256d sq = _mm256_mul_pd(v, v);
        const __m256d r2 = _mm256_hadd_pd(sq, sq); // [r0^2 r0^2 r1^2 r1^2]
        const __m256d r = _mm256_sqrt_pd(r2);
        const __m256d neg = _mm256_sub_pd(zero, v);
        __m256d res = _mm256_div_pd(neg, r);
        const __m256d is_zero = _mm256_cmp_pd(r2, zero, _CMP_EQ_OQ);
        const __m256d fb = fallback
            ? _mm256_loadu_pd(reinterpret_cast<const double *>(fallback) + 2 * i)
            : one_re;
        res = _mm256_blendv_pd(res, fb, is_zero);
        _mm256_storeu_pd(po + 2 * i, res);
    }
    if (i < n)
        scalar::align_phases(b + i, fallback ? fallback + i : nullptr, out + i, n - i);
}

RISSIM_AVX2 void project_discrete(const cd *b, const double *cos_phi, const double *sin_phi,
                                  std::size_t nq, cd *out, std::size_t n) {
    const double *pb = reinterpret_cast<const double *>(b);
    double *po = reinterpret_cast<double *>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(pb + 2 * i);
        __m256d best_cs = _mm256_setr_pd(cos_phi[0], sin_phi[0], cos_phi[0], sin_phi[0]);
        __m256d prod = _mm256_mul_pd(v, best_cs);
        __m256d best_val = _mm256_hadd_pd(prod, prod);
        for (std::size_t q = 1; q < nq; ++q) {
            const __m256d cs = _mm256_setr_pd(cos_phi[q], sin_phi[q], cos_phi[q], sin_phi[q]);
            prod = _mm256_mul_pd(v, cs);
            const __m256d val = _mm256_hadd_pd(prod, prod);
            const __m256d better = _mm256_cmp_pd(val, best_val, _CMP_LT_OQ);
            best_val = _mm256_blendv_pd(best_val, val, better);
            best_cs = _mm256_blendv_pd(best_cs, cs, better);
        }
        _mm256_storeu_pd(po + 2 * i, best_cs);
    }
    if (i < n)
        scalar::project_discrete(b + i, cos_phi, sin_phi, nq, out + i, n - i);
}

RISSIM_AVX2 double abs2_sum(const cd *x, std::size_t n) {
    const double *px = reinterpret_cast<const double *>(x);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(px + 2 * i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    if (i < n)
        s += scalar::abs2_sum(x + i, n - i);
    return s;
}

#else

void align_phases(const cd *b, const cd *fallback, cd *out, std::size_t n) {
    scalar::align_phases(b, fallback, out, n);
}
void project_discrete(const cd *b, const double *cos_phi, const double *sin_phi,
                      std::size_t nq, cd *out, std::size_t n) {
    scalar::project_discrete(b, cos_phi, sin_phi, nq, out, n);
}
double abs2_sum(const cd *x, std::size_t n) { return scalar::abs2_sum(x, n); }

#endif

} // namespace rissim::kernels::avx2
