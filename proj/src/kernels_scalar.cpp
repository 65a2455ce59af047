#include "coclab/kernels.hpp"

namespace coclab::kernels::detail {

double sum_scalar(const double* a, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 += a[i];
        acc1 += a[i + 1];
        acc2 += a[i + 2];
        acc3 += a[i + 3];
    }
    for (; i < n; ++i)
        acc0 += a[i];
    return (acc0 + acc1) + (acc2 + acc3);
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 += a[i] * b[i];
        acc1 += a[i + 1] * b[i + 1];
        acc2 += a[i + 2] * b[i + 2];
        acc3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i)
        acc0 += a[i] * b[i];
    return (acc0 + acc1) + (acc2 + acc3);
}

void zaxpy_scalar(std::complex<double> alpha, const std::complex<double>* x,
                  std::complex<double>* y, std::size_t n) {
    const double ar = alpha.real(), ai = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = {y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr};
    }
}

std::complex<double> zdotu_scalar(const std::complex<double>* a, const std::complex<double>* b,
                                  std::size_t n) {
    double re0 = 0.0, im0 = 0.0, re1 = 0.0, im1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        re0 += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im0 += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
        re1 += a[i + 1].real() * b[i + 1].real() - a[i + 1].imag() * b[i + 1].imag();
        im1 += a[i + 1].real() * b[i + 1].imag() + a[i + 1].imag() * b[i + 1].real();
    }
    if (i < n) {
        re0 += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
        im0 += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
    }
    return {re0 + re1, im0 + im1};
}

} // namespace coclab::kernels::detail
