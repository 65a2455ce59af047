#pragma once

// Test-side oracles, independent of the library's accumulation paths.

#include <cmath>
#include <cstdint>
#include <vector>

#include "coclab/randwalk.hpp"
#include "coclab/rng.hpp"

namespace oracles {

// Walk the full matrix product S_n = g_n ... g_1 without renormalization and
// return log ||S_n v||. Valid for small n only (entries stay in range).
inline double naive_log_norm(const coclab::measure_spec& mu, const coclab::proj_point& x0,
                             std::size_t n, std::uint64_t seed) {
    coclab::rng_stream rng(seed, 0);
    coclab::matrix prod = coclab::matrix::identity(mu.dim());
    for (std::size_t k = 0; k < n; ++k)
        prod = mu.atoms()[mu.sample_atom(rng.u01())].first.entries() * prod;
    const auto w = prod.apply(x0.rep());
    double n2 = 0.0;
    for (double c : w)
        n2 += c * c;
    return 0.5 * std::log(n2);
}

// The same S_n as a matrix (for coefficient-identity checks).
inline coclab::matrix naive_product(const coclab::measure_spec& mu, std::size_t n,
                                    std::uint64_t seed) {
    coclab::rng_stream rng(seed, 0);
    coclab::matrix prod = coclab::matrix::identity(mu.dim());
    for (std::size_t k = 0; k < n; ++k)
        prod = mu.atoms()[mu.sample_atom(rng.u01())].first.entries() * prod;
    return prod;
}

// Exact large-deviation probability P(|sigma(S_n, x) - n gamma| >= n eps) for
// a two-atom measure by enumerating all 2^n words.
inline double exact_ldt_probability(const coclab::measure_spec& mu,
                                    const coclab::proj_point& x0, std::size_t n, double gamma,
                                    double epsilon) {
    const std::size_t words = std::size_t{1} << n;
    const double p0 = mu.atoms()[0].second;
    const double p1 = mu.atoms()[1].second;
    double total = 0.0;
    for (std::size_t w = 0; w < words; ++w) {
        std::vector<double> v = x0.rep();
        double sigma = 0.0;
        double prob = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t atom = (w >> k) & 1u;
            prob *= atom == 0 ? p0 : p1;
            const auto img = mu.atoms()[atom].first.entries().apply(v);
            double n2 = 0.0;
            for (double c : img)
                n2 += c * c;
            sigma += 0.5 * std::log(n2);
            const double inv = 1.0 / std::sqrt(n2);
            v.resize(img.size());
            for (std::size_t i = 0; i < img.size(); ++i)
                v[i] = img[i] * inv;
        }
        if (std::fabs(sigma - static_cast<double>(n) * gamma) >=
            static_cast<double>(n) * epsilon)
            total += prob;
    }
    return total;
}

// Standard normal cdf by the Maclaurin series Phi(x) = 1/2 + phi(x) (x +
// x^3/3 + x^5/(3*5) + ...); independent of erfc.
inline double normal_cdf_series(double x) {
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    double term = x, acc = x;
    for (int k = 1; k < 200; ++k) {
        term *= x * x / (2.0 * static_cast<double>(k) + 1.0);
        acc += term;
        if (std::fabs(term) < 1e-18)
            break;
    }
    return 0.5 + phi * acc;
}

// Shared test measures.
inline coclab::measure_spec mu_scalar2() {
    using namespace coclab;
    return measure_spec({{group_element(matrix::diagonal({2.0, 2.0})), 1.0}});
}

inline coclab::measure_spec mu_generic() {
    using namespace coclab;
    const matrix d = matrix::diagonal({2.0, 0.5});
    const matrix rd = matrix::rotation2(M_PI / 4.0) * d;
    return measure_spec({{group_element(d), 0.5}, {group_element(rd), 0.5}});
}

inline coclab::measure_spec mu_symmetric() {
    using namespace coclab;
    const matrix g = matrix::rotation2(M_PI / 5.0) * matrix::diagonal({3.0, 1.0 / 3.0});
    return measure_spec({{group_element(g), 0.5}, {group_element(g.inverse()), 0.5}});
}

inline coclab::measure_spec mu_rotation(double angle = 1.0) {
    using namespace coclab;
    return measure_spec({{group_element(matrix::rotation2(angle)), 1.0}});
}

} // namespace oracles
