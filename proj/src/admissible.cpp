#include "coclab/admissible.hpp"

#include <cmath>

#include "coclab/errors.hpp"
#include "coclab/rng.hpp"
#include "coclab/stats.hpp"

namespace coclab {

admissible_fn u_zero() {
    admissible_fn u;
    u.eval = [](const proj_point&) { return ext_real(0.0); };
    u.eta_star = 1.0;
    u.alpha_star = 1.0;
    u.a_star = 1.0;
    u.name = "zero";
    return u;
}

admissible_fn u_logdist(const dual_proj_point& y, double eta_star, double a_star) {
    admissible_fn u;
    u.eval = [y](const proj_point& x) -> ext_real {
        const double d = delta(x, y);
        if (d == 0.0)
            return ext_real::neg_inf();
        return ext_real(std::log(d));
    };
    u.eta_star = eta_star;
    u.alpha_star = 1.0;
    u.a_star = a_star;
    u.name = "logdist";
    u.singular_hyperplane = y;
    return u;
}

namespace {

// Cubic smoothstep on [0, 1].
double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }
double smoothstep_derivative(double t) { return 6.0 * t * (1.0 - t); }

} // namespace

// Plateau |t| <= 1/4, cubic transition on [1/4, 3/4], zero beyond. The
// transition is centered at 1/2, so chi~(t) + chi~(t-1) = 1 on [0, 1], and
// max |chi~'| = 3, giving C^1 norm 4.
double chi_tilde(double t) {
    const double a = std::fabs(t);
    if (a <= 0.25)
        return 1.0;
    if (a >= 0.75)
        return 0.0;
    return 1.0 - smoothstep(2.0 * a - 0.5);
}

double chi_tilde_derivative(double t) {
    const double a = std::fabs(t);
    if (a <= 0.25 || a >= 0.75)
        return 0.0;
    const double d = -2.0 * smoothstep_derivative(2.0 * a - 0.5);
    return t >= 0.0 ? d : -d;
}

partition_bump partition(const admissible_fn& u, int k) { return partition_bump(u, k); }

double partition_sum(const admissible_fn& u, const proj_point& w) {
    const ext_real uw = u(w);
    if (!uw.finite())
        return 0.0;
    const double v = uw.value();
    // chi~(v + k) is nonzero only for |v + k| < 1.
    const int k_lo = static_cast<int>(std::floor(-v - 1.0));
    double total = 0.0;
    for (int k = k_lo; k <= k_lo + 3; ++k)
        total += chi_tilde(v + static_cast<double>(k));
    return total;
}

property1_report check_property1(const admissible_fn& u,
                                 const std::vector<proj_point>& nu_samples,
                                 const std::vector<double>& t_grid) {
    if (nu_samples.size() < 10000)
        throw precondition_error("check_property1: needs at least 1e4 samples");
    property1_report rep;
    const std::size_t m = nu_samples.size();
    std::vector<double> absu;
    absu.reserve(m);
    std::size_t infinite = 0;
    for (const auto& x : nu_samples) {
        const ext_real v = u(x);
        if (v.finite())
            absu.push_back(std::fabs(v.value()));
        else
            ++infinite;
    }
    constexpr double z99 = 2.5758293035489004;
    for (double t : t_grid) {
        property1_row row;
        row.t = t;
        std::size_t count = infinite;
        for (double a : absu)
            if (a >= t)
                ++count;
        row.tail_hat = static_cast<double>(count) / static_cast<double>(m);
        row.bound = u.a_star * std::exp(-u.eta_star * t);
        const double p = std::fmin(row.bound, 1.0);
        row.slack = z99 * std::sqrt(std::fmax(p * (1.0 - p), row.tail_hat) /
                                    static_cast<double>(m)) +
                    z99 * z99 / static_cast<double>(m);
        row.pass = row.tail_hat <= row.bound + row.slack;
        rep.all_pass = rep.all_pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

property2_report check_property2(const admissible_fn& u,
                                 const std::vector<std::pair<proj_point, proj_point>>& pairs) {
    property2_report rep;
    rep.pairs_checked = pairs.size();
    for (const auto& [x, xp] : pairs) {
        const ext_real ux = u(x);
        const ext_real uxp = u(xp);
        if (!ux.finite() || !uxp.finite())
            throw singular_input_error("check_property2: pair touches the singular set");
        const double lhs = std::fabs(ux.value() - uxp.value());
        if (lhs == 0.0)
            continue;
        const double d = proj_distance(x, xp);
        const double rhs = u.a_star * std::pow(d, u.alpha_star) *
                           (std::exp(u.alpha_star * std::fabs(ux.value())) +
                            std::exp(u.alpha_star * std::fabs(uxp.value())));
        if (rhs == 0.0)
            continue; // identical points, lhs == 0 handled above
        rep.max_ratio = std::fmax(rep.max_ratio, lhs / rhs);
    }
    rep.pass = rep.max_ratio <= 1.0;
    return rep;
}

double partition_holder_check(const admissible_fn& u, int k, double alpha,
                              const std::vector<std::pair<proj_point, proj_point>>& pairs) {
    if (!(alpha > 0.0) || alpha > u.alpha_star)
        throw precondition_error("partition_holder_check: need 0 < alpha <= alpha_*");
    const partition_bump chi(u, k);
    const double scale = std::exp(alpha * std::fabs(static_cast<double>(k)));
    double max_ratio = 0.0;
    for (const auto& [x, xp] : pairs) {
        const double num = std::fabs(chi(x) - chi(xp));
        if (num == 0.0)
            continue;
        const double d = proj_distance(x, xp);
        if (d == 0.0)
            continue;
        max_ratio = std::fmax(max_ratio, num / (std::pow(d, alpha) * scale));
    }
    return max_ratio;
}

std::vector<tail_ldt_row> tail_ldt_probe(const measure_spec& mu, const admissible_fn& u,
                                         const proj_point& x0,
                                         const std::vector<std::size_t>& n_list,
                                         std::size_t trials, double a_const,
                                         std::uint64_t seed, int threads) {
    if (!(a_const > 0.0))
        throw precondition_error("tail_ldt_probe: a_const must be positive");
    std::vector<tail_ldt_row> table;
    if (trials == 0)
        return table;
    std::uint64_t salt = 0;
    for (std::size_t n : n_list) {
        tail_ldt_row row;
        row.n = n;
        row.trials = trials;
        const auto ens = run_ensemble(mu, x0, n, trials, seed ^ mix64(salt), threads);
        const double thr = a_const * std::log(static_cast<double>(n));
        for (std::size_t i = 0; i < ens.trials; ++i)
            if (u(ens.end_point(i)).abs_geq(thr))
                ++row.hits;
        row.p_hat = static_cast<double>(row.hits) / static_cast<double>(trials);
        row.n_times_p = static_cast<double>(n) * row.p_hat;
        row.upper99 = wilson_upper(row.hits, trials, 2.5758293035489004);
        table.push_back(row);
        ++salt;
    }
    return table;
}

} // namespace coclab
