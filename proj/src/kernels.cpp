#include "coclab/kernels.hpp"

#include <atomic>

#include "coclab/errors.hpp"

namespace coclab::kernels {

namespace {

bool avx2_supported() {
#ifdef COCLAB_HAVE_AVX2
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<backend>& active_slot() {
    static std::atomic<backend> slot{avx2_supported() ? backend::avx2 : backend::scalar};
    return slot;
}

} // namespace

backend active() { return active_slot().load(std::memory_order_relaxed); }

void force(backend b) {
    if (b == backend::avx2 && !avx2_supported())
        throw error("kernels: AVX2 backend not supported on this CPU");
    active_slot().store(b, std::memory_order_relaxed);
}

std::string name(backend b) { return b == backend::avx2 ? "avx2" : "scalar"; }

double sum(std::span<const double> a) {
#ifdef COCLAB_HAVE_AVX2
    if (active() == backend::avx2)
        return detail::sum_avx2(a.data(), a.size());
#endif
    return detail::sum_scalar(a.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
#ifdef COCLAB_HAVE_AVX2
    if (active() == backend::avx2)
        return detail::dot_avx2(a.data(), b.data(), a.size());
#endif
    return detail::dot_scalar(a.data(), b.data(), a.size());
}

std::complex<double> zdotu(std::span<const std::complex<double>> a,
                           std::span<const std::complex<double>> b) {
#ifdef COCLAB_HAVE_AVX2
    if (active() == backend::avx2)
        return detail::zdotu_avx2(a.data(), b.data(), a.size());
#endif
    return detail::zdotu_scalar(a.data(), b.data(), a.size());
}

void zgemv(std::size_t rows, std::size_t cols, const std::complex<double>* a,
           const std::complex<double>* x, std::complex<double>* y) {
#ifdef COCLAB_HAVE_AVX2
    if (active() == backend::avx2) {
        for (std::size_t i = 0; i < rows; ++i)
            y[i] = detail::zdotu_avx2(a + i * cols, x, cols);
        return;
    }
#endif
    for (std::size_t i = 0; i < rows; ++i)
        y[i] = detail::zdotu_scalar(a + i * cols, x, cols);
}

void zaxpy(std::complex<double> alpha, std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y) {
#ifdef COCLAB_HAVE_AVX2
    if (active() == backend::avx2) {
        detail::zaxpy_avx2(alpha, x.data(), y.data(), x.size());
        return;
    }
#endif
    detail::zaxpy_scalar(alpha, x.data(), y.data(), x.size());
}

} // namespace coclab::kernels
