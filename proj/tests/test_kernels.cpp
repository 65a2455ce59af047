#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "coclab/kernels.hpp"
#include "coclab/rng.hpp"

using namespace coclab;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t stream) {
    rng_stream rng(0xC0FFEEULL, stream);
    std::vector<double> v(n);
    for (auto& x : v)
        x = 2.0 * rng.u01() - 1.0;
    return v;
}

std::vector<std::complex<double>> random_cvec(std::size_t n, std::uint64_t stream) {
    rng_stream rng(0xC0FFEEULL, stream);
    std::vector<std::complex<double>> v(n);
    for (auto& x : v)
        x = {2.0 * rng.u01() - 1.0, 2.0 * rng.u01() - 1.0};
    return v;
}

} // namespace

TEST_CASE("scalar and simd backends agree") {
    for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 64ul, 1001ul, 4096ul}) {
        const auto a = random_vec(n, n);
        const auto b = random_vec(n, n + 100);
        const auto ca = random_cvec(n, n + 200);
        const auto cb = random_cvec(n, n + 300);

        const double s_ref = kernels::detail::sum_scalar(a.data(), n);
        const double d_ref = kernels::detail::dot_scalar(a.data(), b.data(), n);
        const auto z_ref = kernels::detail::zdotu_scalar(ca.data(), cb.data(), n);

#ifdef COCLAB_HAVE_AVX2
        if (kernels::active() == kernels::backend::avx2) {
            const double s = kernels::detail::sum_avx2(a.data(), n);
            const double d = kernels::detail::dot_avx2(a.data(), b.data(), n);
            const auto z = kernels::detail::zdotu_avx2(ca.data(), cb.data(), n);
            const double scale = static_cast<double>(n) + 1.0;
            CHECK(std::fabs(s - s_ref) <= 1e-12 * scale);
            CHECK(std::fabs(d - d_ref) <= 1e-12 * scale);
            CHECK(std::abs(z - z_ref) <= 1e-12 * scale);

            std::vector<std::complex<double>> y_ref(n, {0.1, -0.2});
            auto y = y_ref;
            kernels::detail::zaxpy_scalar({0.3, 0.7}, ca.data(), y_ref.data(), n);
            kernels::detail::zaxpy_avx2({0.3, 0.7}, ca.data(), y.data(), n);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(std::abs(y[i] - y_ref[i]) <= 1e-13);
        }
#endif
        // Reference sanity on tiny cases.
        if (n == 3) {
            CHECK(s_ref == doctest::Approx(a[0] + a[1] + a[2]));
            CHECK(d_ref == doctest::Approx(a[0] * b[0] + a[1] * b[1] + a[2] * b[2]));
        }
    }
}

TEST_CASE("zgemv matches hand expansion") {
    const std::size_t m = 5;
    const auto a = random_cvec(m * m, 11);
    const auto x = random_cvec(m, 12);
    std::vector<std::complex<double>> y(m);
    kernels::zgemv(m, m, a.data(), x.data(), y.data());
    for (std::size_t i = 0; i < m; ++i) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            acc += a[i * m + j] * x[j];
        CHECK(std::abs(y[i] - acc) <= 1e-13);
    }
}

TEST_CASE("backend can be forced to scalar and back") {
    const auto saved = kernels::active();
    kernels::force(kernels::backend::scalar);
    CHECK(kernels::active() == kernels::backend::scalar);
    const auto a = random_vec(100, 1);
    CHECK(kernels::sum(a) == doctest::Approx(kernels::detail::sum_scalar(a.data(), 100)));
    kernels::force(saved);
}

TEST_CASE("rng streams are deterministic and distinct") {
    rng_stream a(42, 7), b(42, 7), c(42, 8);
    bool same = true, differ = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        same = same && (x == b.next());
        differ = differ || (x != c.next());
    }
    CHECK(same);
    CHECK(differ);
}

TEST_CASE("rng gauss moments") {
    rng_stream rng(7, 0);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gauss();
        s += g;
        s2 += g * g;
    }
    CHECK(std::fabs(s / n) < 0.01);
    CHECK(std::fabs(s2 / n - 1.0) < 0.02);
}
