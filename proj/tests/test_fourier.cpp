#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "coclab/errors.hpp"
#include "coclab/fourier.hpp"
#include "coclab/rng.hpp"
#include "coclab/stats.hpp"

using namespace coclab;

TEST_CASE("kernel mass, support and tail") {
    for (double d : {1.0, 0.5, 0.1}) {
        const auto k = make_kernel(d);
        CHECK(std::fabs(k.profile.trapezoid_integral() - 1.0) <= 1e-6);
        const double band = 1.0 / (d * d);
        CHECK(k.theta_delta_hat(band * 1.0000001) == 0.0);
        CHECK(k.theta_delta_hat(-band * 1.1) == 0.0);
        for (std::size_t i = 0; i < k.ft_profile.size(); ++i)
            if (std::fabs(k.ft_profile.t(i)) > band)
                CHECK(std::fabs(k.ft_profile.values[i]) <= 1e-8);
    }
    // tail / delta^2 bounded by one constant over the sweep.
    std::vector<double> ratios;
    for (double d : {0.5, 0.2, 0.1})
        ratios.push_back(make_kernel(d).tail_mass / (d * d));
    for (double r : ratios)
        CHECK(r <= 10.5);
    CHECK_THROWS_AS(make_kernel(0.0), precondition_error);
    CHECK_THROWS_AS(make_kernel(1.5), precondition_error);
}

TEST_CASE("kernel symmetry and Plancherel") {
    const auto k = make_kernel(0.4);
    const auto& v = k.profile.values;
    for (std::size_t i = 0; i < v.size() / 2; i += 7)
        CHECK(std::fabs(v[i] - v[v.size() - 1 - i]) <= 1e-12);

    // int theta^2 dt (time) vs (1/2pi) int theta_hat^2 dxi (frequency).
    double time_side = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double w = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
        time_side += w * v[i] * v[i];
    }
    time_side *= k.profile.step;
    const double band = 1.0 / (k.delta * k.delta);
    double freq_side = 0.0;
    const std::size_t nodes = 40000;
    const double dxi = 2.0 * band / static_cast<double>(nodes);
    for (std::size_t i = 0; i <= nodes; ++i) {
        const double xi = -band + static_cast<double>(i) * dxi;
        const double w = (i == 0 || i == nodes) ? 0.5 : 1.0;
        const double f = k.theta_delta_hat(xi);
        freq_side += w * f * f;
    }
    freq_side *= dxi / (2.0 * std::numbers::pi);
    CHECK(std::fabs(time_side - freq_side) <= 1e-4 * std::fabs(time_side));
}

TEST_CASE("smooth: constant and linear are fixed points") {
    const auto k = make_kernel(0.3);
    const double fine = k.profile.step; // psi grid must not be coarser
    const auto c = sampled_function::from_function(-2.0, 2.0, fine,
                                                   [](double) { return 0.7; });
    const auto sc = smooth(c, k);
    for (double v : sc.values)
        CHECK(std::fabs(v - 0.7) <= 1e-12);

    // Odd moments vanish: a linear stretch is reproduced at the grid center
    // (the grid is wide enough that the kernel never sees the edges there).
    const double reach = k.profile.t_max();
    const auto lin = sampled_function::from_function(-reach - 2.0, reach + 2.0, fine,
                                                     [](double t) { return 0.009 * t; });
    const auto sl = smooth(lin, k);
    for (std::size_t i = 0; i < sl.size(); ++i)
        if (std::fabs(sl.t(i)) <= 1.0)
            CHECK(std::fabs(sl.values[i] - lin.values[i]) <= 1e-9);
}

TEST_CASE("smooth: clamp deviation is O(delta^2)") {
    const auto clamp01 = [](double t) { return std::clamp(t, 0.0, 1.0); };
    for (double d : {0.5, 0.25, 0.125}) {
        const auto k = make_kernel(d);
        const double pad = k.profile.t_max() + 1.0;
        const auto psi = sampled_function::from_function(-pad, pad + 1.0, d * d / 10.0,
                                                         clamp01);
        const auto sm = smooth(psi, k);
        double dev = 0.0;
        for (std::size_t i = 0; i < sm.size(); ++i)
            if (std::fabs(sm.t(i)) <= 3.0)
                dev = std::fmax(dev, std::fabs(sm.values[i] - psi.values[i]));
        CHECK(dev / (d * d) <= 2.7);
    }
}

TEST_CASE("smooth preconditions") {
    const auto k = make_kernel(0.3);
    const auto steep = sampled_function::from_function(-1.0, 1.0, k.profile.step,
                                                       [](double t) { return 3.0 * t; });
    CHECK_THROWS_AS(smooth(steep, k), precondition_error);

    const auto coarse = sampled_function::from_function(-1.0, 1.0, 0.5,
                                                        [](double) { return 0.0; });
    CHECK_THROWS_AS(smooth(coarse, k), grid_mismatch_error);
}

TEST_CASE("approx_pm brackets and converges in L1") {
    const auto tri = [](double t) { return std::fmax(0.0, 1.0 - std::fabs(t)); };
    const auto psi = sampled_function::from_function(-1.0, 1.0, 0.001, tri);

    const auto zero = sampled_function::from_function(-1.0, 1.0, 0.001,
                                                      [](double) { return 0.0; });
    const auto [zm, zp] = approx_pm(zero, 0.3);
    for (double v : zp.values)
        CHECK(std::fabs(v) <= 1e-12);
    for (double v : zm.values)
        CHECK(std::fabs(v) <= 1e-12);

    std::vector<double> l1p, l1m;
    for (double d : {0.4, 0.2, 0.1}) {
        const auto [minus, plus] = approx_pm(psi, d);
        for (std::size_t i = 0; i < plus.size(); ++i) {
            const double p = tri(plus.t(i));
            CHECK(plus.values[i] >= p - 1e-9);
            CHECK(minus.values[i] <= p + 1e-9);
        }
        const auto exact = sampled_function::from_function(plus.t0, plus.t_max(),
                                                           plus.step, tri);
        l1p.push_back(l1_distance(plus, exact));
        l1m.push_back(l1_distance(minus, exact));
    }
    for (std::size_t i = 1; i < l1p.size(); ++i) {
        CHECK(l1p[i] <= 1.1 * l1p[i - 1]);
        CHECK(l1m[i] <= 1.1 * l1m[i - 1]);
    }

    const auto big = sampled_function::from_function(-1.0, 1.0, 0.01,
                                                     [](double) { return 2.0; });
    CHECK_THROWS_AS(approx_pm(big, 0.2), precondition_error);
}

TEST_CASE("conjugate characteristic function") {
    CHECK_THROWS_AS(conj_char({}, 1.0), empty_sample_error);

    const std::vector<double> zeros(100, 0.0);
    CHECK(std::abs(conj_char(zeros, 3.7) - 1.0) <= 1e-15);
    CHECK(std::abs(conj_char({0.3, -1.2, 5.0}, 0.0) - 1.0) <= 1e-15);

    rng_stream rng(404, 0);
    std::vector<double> gauss(1000000);
    for (auto& g : gauss)
        g = rng.gauss();
    const auto phi = conj_char(gauss, 1.0);
    CHECK(std::abs(phi - std::exp(-0.5)) <= 0.005);
    CHECK(std::abs(phi) <= 1.0);

    // Independence: phi_{X+Y} = phi_X phi_Y within Monte Carlo error.
    std::vector<double> x(200000), y(200000), sum(200000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.gauss();
        y[i] = 0.5 * rng.gauss() + 0.3;
        sum[i] = x[i] + y[i];
    }
    const double xi = 0.8;
    const auto lhs = conj_char(sum, xi);
    const auto rhs = conj_char(x, xi) * conj_char(y, xi);
    CHECK(std::abs(lhs - rhs) <= 4.0 / std::sqrt(static_cast<double>(x.size())));
}

TEST_CASE("pv functional: zero for matching laws, monotone in the shift") {
    const double rho2 = 1.0;
    auto h_hat = [rho2](double xi) {
        return std::complex<double>(std::exp(-0.5 * rho2 * xi * xi), 0.0);
    };
    const auto kernel = make_kernel(0.4);
    std::vector<double> ts;
    for (int i = -10; i <= 10; ++i)
        ts.push_back(0.6 * static_cast<double>(i));

    const auto zero = pv_be_functional(h_hat, h_hat, kernel, ts, 2000);
    CHECK(zero.value == 0.0);

    auto shifted = [&](double a) {
        return [a, rho2](double xi) {
            return std::exp(std::complex<double>(0.0, -xi * a)) *
                   std::exp(-0.5 * rho2 * xi * xi);
        };
    };
    std::vector<double> vals;
    for (double a : {0.01, 0.02, 0.04})
        vals.push_back(pv_be_functional(shifted(a), h_hat, kernel, ts, 2000).value);
    CHECK(vals[0] < vals[1]);
    CHECK(vals[1] < vals[2]);

    // The functional tracks sup|F - H| from above up to affine calibration.
    std::vector<double> sups;
    for (double a : {0.01, 0.02, 0.04}) {
        // sup_t |Phi(t - a) - Phi(t)| is attained at the midpoint.
        sups.push_back(std::erf(a / (2.0 * std::sqrt(2.0 * rho2))));
    }
    const auto fitted = fit_line(sups, vals);
    CHECK(fitted.slope > 0.0);

    // delta-sweep stability for a fixed shift.
    const auto v1 = pv_be_functional(shifted(0.02), h_hat, make_kernel(0.4), ts, 2000).value;
    const auto v2 = pv_be_functional(shifted(0.02), h_hat, make_kernel(0.2), ts, 4000).value;
    CHECK(std::fabs(v1 - v2) <= 1.0 * 0.4 * 0.4);
}

TEST_CASE("pv functional flags a genuine singularity") {
    const auto kernel = make_kernel(0.5);
    auto h_hat = [](double xi) {
        return std::complex<double>(std::exp(-0.5 * xi * xi), 0.0);
    };
    auto bad = [&](double xi) {
        return h_hat(xi) + std::complex<double>(0.0, xi >= 0.0 ? 5000.0 : -5000.0);
    };
    CHECK_THROWS_AS(pv_be_functional(bad, h_hat, kernel, {0.0}, 2000), singularity_error);
}
