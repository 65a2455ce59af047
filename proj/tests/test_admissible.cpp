#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "coclab/admissible.hpp"
#include "coclab/errors.hpp"
#include "coclab/rng.hpp"
#include "oracles.hpp"

using namespace coclab;

namespace {

measure_spec mu_smooth() {
    const matrix d = matrix::diagonal({1.3, 1.0 / 1.3});
    return measure_spec({{group_element(matrix::rotation2(0.3) * d), 0.5},
                         {group_element(matrix::rotation2(-0.7) * d), 0.5}});
}

std::vector<proj_point> random_points(std::size_t count, std::uint64_t seed) {
    rng_stream rng(seed, 0);
    std::vector<proj_point> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        pts.push_back(proj_point::from_angle(rng.u01() * std::numbers::pi));
    return pts;
}

} // namespace

TEST_CASE("chi_tilde base bump") {
    CHECK(chi_tilde(0.0) == 1.0);
    CHECK(chi_tilde(0.2) == 1.0);
    CHECK(chi_tilde(0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(chi_tilde(0.75) == 0.0);
    CHECK(chi_tilde(1.0) == 0.0);
    CHECK(chi_tilde(-1.0) == 0.0);
    // Partition identity chi~(t) + chi~(t-1) = 1 on [0, 1].
    for (int i = 0; i <= 1000; ++i) {
        const double t = static_cast<double>(i) / 1000.0;
        CHECK(std::fabs(chi_tilde(t) + chi_tilde(t - 1.0) - 1.0) <= 1e-14);
    }
    // C^1 norm <= 4.
    double sup = 0.0, dsup = 0.0;
    for (int i = -1200; i <= 1200; ++i) {
        const double t = static_cast<double>(i) / 1000.0;
        sup = std::fmax(sup, std::fabs(chi_tilde(t)));
        dsup = std::fmax(dsup, std::fabs(chi_tilde_derivative(t)));
    }
    CHECK(sup + dsup <= 4.0 + 1e-12);
}

TEST_CASE("u_zero examples") {
    const auto u = u_zero();
    CHECK(u(proj_point::basis(2, 0)).value() == 0.0);
    // chi_0 = 1 and chi_k = 0 for k != 0.
    const proj_point w = proj_point::from_angle(0.9);
    CHECK(partition(u, 0)(w) == 1.0);
    for (int k : {-3, -1, 1, 2})
        CHECK(partition(u, k)(w) == 0.0);

    const auto p2 = check_property2(u, {{proj_point::from_angle(0.1),
                                         proj_point::from_angle(1.2)}});
    CHECK(p2.max_ratio == 0.0);
    CHECK(p2.pass);
}

TEST_CASE("u_logdist examples") {
    const dual_proj_point y = dual_proj_point::basis(2, 1); // H_y = [e1]
    const auto u = u_logdist(y);
    // Unit distance from the hyperplane: u = 0.
    CHECK(std::fabs(u(proj_point::basis(2, 1)).value()) <= 1e-12);
    // On the hyperplane: tagged -inf.
    CHECK(u(proj_point::basis(2, 0)).is_neg_inf());
    // Diagonal line: log(sqrt(2)/2).
    const proj_point diag({1.0, 1.0});
    CHECK(u(diag).value() == doctest::Approx(std::log(std::sqrt(2.0) / 2.0)).epsilon(1e-12));
    // Identity with delta on sampled points.
    rng_stream rng(5, 0);
    for (int i = 0; i < 1000; ++i) {
        const proj_point x = proj_point::from_angle(rng.u01() * std::numbers::pi);
        const double d = delta(x, y);
        if (d == 0.0)
            continue;
        CHECK(std::fabs(u(x).value() - std::log(d)) <= 1e-12);
    }
}

TEST_CASE("partition localizes on exact level sets") {
    const dual_proj_point y = dual_proj_point::basis(2, 1);
    const auto u = u_logdist(y);
    // u(x) = -2 exactly at sin(theta) = e^{-2}.
    const proj_point x2 = proj_point::from_angle(std::asin(std::exp(-2.0)));
    CHECK(partition(u, 2)(x2) == 1.0);
    CHECK(partition(u, 1)(x2) == 0.0);
    CHECK(partition(u, 3)(x2) == 0.0);

    // u(x) = -k - 1/2: the two adjacent bumps split the mass.
    const proj_point xh = proj_point::from_angle(std::asin(std::exp(-2.5)));
    const double c2 = partition(u, 2)(xh);
    const double c3 = partition(u, 3)(xh);
    CHECK(std::fabs(c2 + c3 - 1.0) <= 1e-12);
    CHECK(c2 > 0.0);
    CHECK(c3 > 0.0);
}

TEST_CASE("partition invariants on sampled points") {
    const dual_proj_point y = dual_proj_point::basis(2, 1);
    for (const auto& u : {u_zero(), u_logdist(y)}) {
        const auto pts = random_points(10000, 11);
        for (const auto& w : pts) {
            const ext_real uv = u(w);
            if (!uv.finite())
                continue;
            CHECK(std::fabs(partition_sum(u, w) - 1.0) <= 1e-12);
            const double v = uv.value();
            const int kc = static_cast<int>(std::lround(-v));
            std::size_t nonzero = 0;
            for (int k = kc - 3; k <= kc + 3; ++k) {
                const double b = partition(u, k)(w);
                if (b != 0.0) {
                    ++nonzero;
                    CHECK(std::fabs(v + static_cast<double>(k)) < 1.0);
                }
            }
            CHECK(nonzero <= 2);
            CHECK(nonzero >= 1);
        }
    }
}

TEST_CASE("property 1 empirical tails") {
    const auto mu = mu_smooth();
    const proj_point x0 = proj_point::basis(2, 0);
    const auto samples = empirical_stationary(mu, x0, 1500, 20000, 313);
    std::vector<double> t_grid;
    for (int i = 0; i <= 10; ++i)
        t_grid.push_back(0.5 * static_cast<double>(i));

    const auto zero_rep = check_property1(u_zero(), samples, t_grid);
    CHECK(zero_rep.all_pass);
    for (const auto& row : zero_rep.rows)
        if (row.t > 0.0)
            CHECK(row.tail_hat == 0.0);

    const dual_proj_point y = dual_proj_point::basis(2, 1);
    const auto fit = regularity_fit(samples, y, {0.5, 0.25, 0.1, 0.05, 0.02, 0.01, 0.005});
    const auto fitted = u_logdist(y, fit.eta_hat, std::fmax(1.0, 2.0 * fit.c_hat));
    CHECK(check_property1(fitted, samples, t_grid).all_pass);

    // A bound below the trivial tail fails at t = 0.
    const auto hopeless = u_logdist(y, fit.eta_hat, 1e-6);
    const auto rep = check_property1(hopeless, samples, t_grid);
    CHECK_FALSE(rep.all_pass);
    CHECK_FALSE(rep.rows.front().pass);

    CHECK_THROWS_AS(check_property1(u_zero(), random_points(100, 1), t_grid),
                    precondition_error);
}

TEST_CASE("property 2 weighted Holder modulus") {
    const dual_proj_point y = dual_proj_point::basis(2, 1);
    // A_* = 1 is the bound delivered by the log-distance proof.
    const auto u = u_logdist(y, 0.5, 1.0);
    rng_stream rng(77, 0);
    std::vector<std::pair<proj_point, proj_point>> pairs;
    while (pairs.size() < 5000) {
        const proj_point a = proj_point::from_angle(rng.u01() * std::numbers::pi);
        const proj_point b = proj_point::from_angle(rng.u01() * std::numbers::pi);
        if (!u(a).finite() || !u(b).finite())
            continue;
        pairs.emplace_back(a, b);
    }
    const auto rep = check_property2(u, pairs);
    CHECK(rep.pass);
    CHECK(rep.max_ratio <= 1.0);

    pairs.emplace_back(proj_point::basis(2, 0), proj_point::from_angle(0.4));
    CHECK_THROWS_AS(check_property2(u, pairs), singular_input_error);
}

TEST_CASE("partition Holder surrogate") {
    const dual_proj_point y = dual_proj_point::basis(2, 1);
    const auto u = u_logdist(y);

    CHECK(partition_holder_check(u_zero(), 0, 0.5, {{proj_point::from_angle(0.2),
                                                     proj_point::from_angle(1.0)}}) == 0.0);

    rng_stream rng(31, 0);
    auto make_pairs = [&rng](std::size_t count) {
        std::vector<std::pair<proj_point, proj_point>> pairs;
        for (std::size_t i = 0; i < count; ++i) {
            const double a = rng.u01() * std::numbers::pi;
            const double s = (i % 2 == 0) ? rng.u01() : rng.u01() * 1e-3;
            pairs.emplace_back(proj_point::from_angle(a), proj_point::from_angle(a + s));
        }
        return pairs;
    };
    const double r1 = partition_holder_check(u, 0, 0.5, make_pairs(2000));
    const double r2 = partition_holder_check(u, 0, 0.5, make_pairs(4000));
    CHECK(r1 > 0.0);
    CHECK(r2 <= 2.0 * r1);
    CHECK(r1 <= 2.0 * r2);

    // Normalized ratios comparable across k: e^{alpha |k|} absorbs the growth.
    const double rk = partition_holder_check(u, 10, 0.5, make_pairs(4000));
    CHECK(rk <= 10.0 * std::fmax(r2, 1e-6));

    CHECK_THROWS_AS(partition_holder_check(u, 0, 1.5, make_pairs(10)), precondition_error);
}

TEST_CASE("tail ldt probe") {
    const auto mu = mu_smooth();
    const proj_point x0 = proj_point::basis(2, 0);

    CHECK(tail_ldt_probe(mu, u_zero(), x0, {4, 16}, 0, 4.0, 1).empty());

    const auto zero_rows = tail_ldt_probe(mu, u_zero(), x0, {2, 8, 32}, 500, 4.0, 2);
    for (const auto& row : zero_rows)
        CHECK(row.p_hat == 0.0);

    const dual_proj_point y = dual_proj_point::basis(2, 1);
    const auto u = u_logdist(y);
    const auto rows = tail_ldt_probe(mu, u, x0, {16, 64, 256}, 20000, 4.0, 3);
    CHECK(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(row.trials == 20000);
        CHECK(row.upper99 >= row.p_hat);
    }
}
