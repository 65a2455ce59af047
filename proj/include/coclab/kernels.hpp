#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>

namespace coclab::kernels {

/// Arithmetic inner loops used by the hot paths (transfer-operator matvec,
/// Monte Carlo reductions, discrete convolution). Each primitive has a scalar
/// reference implementation and an AVX2 variant; the backend is picked once at
/// runtime from CPU features and can be forced for equivalence testing.
enum class backend { scalar, avx2 };

/// Currently active backend.
backend active();

/// Force a backend (testing hook). Throws coclab::error if the requested
/// backend is not supported on this CPU.
void force(backend b);

/// Human-readable backend name.
std::string name(backend b);

double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);

/// Unconjugated complex dot product sum_i a[i]*b[i].
std::complex<double> zdotu(std::span<const std::complex<double>> a,
                           std::span<const std::complex<double>> b);

/// Dense row-major complex matrix-vector product y = A x, A is rows x cols.
void zgemv(std::size_t rows, std::size_t cols, const std::complex<double>* a,
           const std::complex<double>* x, std::complex<double>* y);

/// y += alpha * x.
void zaxpy(std::complex<double> alpha, std::span<const std::complex<double>> x,
           std::span<std::complex<double>> y);

namespace detail {
double sum_scalar(const double* a, std::size_t n);
double dot_scalar(const double* a, const double* b, std::size_t n);
std::complex<double> zdotu_scalar(const std::complex<double>* a, const std::complex<double>* b,
                                  std::size_t n);
void zaxpy_scalar(std::complex<double> alpha, const std::complex<double>* x,
                  std::complex<double>* y, std::size_t n);
#ifdef COCLAB_HAVE_AVX2
double sum_avx2(const double* a, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
std::complex<double> zdotu_avx2(const std::complex<double>* a, const std::complex<double>* b,
                                std::size_t n);
void zaxpy_avx2(std::complex<double> alpha, const std::complex<double>* x,
                std::complex<double>* y, std::size_t n);
#endif
} // namespace detail

} // namespace coclab::kernels
