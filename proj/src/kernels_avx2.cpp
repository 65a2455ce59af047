#ifdef COCLAB_HAVE_AVX2

#include <immintrin.h>

#include "coclab/kernels.hpp"

namespace coclab::kernels::detail {

namespace {

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

} // namespace

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double tail = 0.0;
    for (; i < n; ++i)
        tail += a[i];
    return hsum(acc) + tail;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double tail = 0.0;
    for (; i < n; ++i)
        tail += a[i] * b[i];
    return hsum(acc) + tail;
}

std::complex<double> zdotu_avx2(const std::complex<double>* a, const std::complex<double>* b,
                                std::size_t n) {
    // Two complex numbers per 256-bit lane, interleaved [re0 im0 re1 im1].
    const double* ap = reinterpret_cast<const double*>(a);
    const double* bp = reinterpret_cast<const double*>(b);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d va = _mm256_loadu_pd(ap + 2 * i);
        __m256d vb = _mm256_loadu_pd(bp + 2 * i);
        __m256d re = _mm256_movedup_pd(va);           // [a.re a.re ...]
        __m256d im = _mm256_unpackhi_pd(va, va);      // [a.im a.im ...]
        __m256d sw = _mm256_permute_pd(vb, 0x5);      // [b.im b.re ...]
        __m256d prod = _mm256_fmaddsub_pd(re, vb, _mm256_mul_pd(im, sw));
        acc = _mm256_add_pd(acc, prod);
    }
    double re_t = 0.0, im_t = 0.0;
    for (; i < n; ++i) {
        re_t += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im_t += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    return {lanes[0] + lanes[2] + re_t, lanes[1] + lanes[3] + im_t};
}

void zaxpy_avx2(std::complex<double> alpha, const std::complex<double>* x,
                std::complex<double>* y, std::size_t n) {
    const double* xp = reinterpret_cast<const double*>(x);
    double* yp = reinterpret_cast<double*>(y);
    const __m256d re = _mm256_set1_pd(alpha.real());
    const __m256d im = _mm256_set1_pd(alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d vx = _mm256_loadu_pd(xp + 2 * i);
        __m256d vy = _mm256_loadu_pd(yp + 2 * i);
        __m256d sw = _mm256_permute_pd(vx, 0x5);
        __m256d prod = _mm256_fmaddsub_pd(re, vx, _mm256_mul_pd(im, sw));
        _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(vy, prod));
    }
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = {y[i].real() + alpha.real() * xr - alpha.imag() * xi,
                y[i].imag() + alpha.real() * xi + alpha.imag() * xr};
    }
}

} // namespace coclab::kernels::detail

#endif // COCLAB_HAVE_AVX2
