#include "coclab/limits.hpp"

#include <cmath>
#include <numbers>

#include "coclab/errors.hpp"
#include "coclab/rng.hpp"
#include "coclab/stats.hpp"

namespace coclab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Stand-in argument for trials where u(S_n x) = -inf: evaluating psi_J there
// produces its left limit for every target in the matrix.
constexpr double kFarLeft = -1e300;

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    if (!(b > a))
        return 0.0;
    if (n % 2 == 1)
        ++n;
    const double h = (b - a) / static_cast<double>(n);
    double acc = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i)
        acc += f(a + static_cast<double>(i) * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double compute_norm_h(const std::function<double(double)>& f) {
    const double lo = -40.0, hi = 40.0, h = 1e-3;
    const std::size_t n = static_cast<std::size_t>((hi - lo) / h) + 1;
    double sup = 0.0, dsup = 0.0, dl1 = 0.0;
    double prev_d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = lo + static_cast<double>(i) * h;
        sup = std::fmax(sup, std::fabs(f(t)));
        const double d = (f(t + h) - f(t - h)) / (2.0 * h);
        dsup = std::fmax(dsup, std::fabs(d));
        if (i > 0)
            dl1 += 0.5 * (std::fabs(prev_d) + std::fabs(d)) * h;
        prev_d = d;
    }
    return sup + dsup + dl1;
}

double sample_holder_quotient(const std::function<double(const proj_point&)>& f,
                              double alpha) {
    rng_stream rng(0x5EED5EEDULL, 7);
    double q = 0.0;
    for (int i = 0; i < 400; ++i) {
        const double a1 = rng.u01() * kPi;
        const double spread = i % 2 == 0 ? rng.u01() * kPi : rng.u01() * 1e-3;
        const double a2 = a1 + spread;
        const proj_point x = proj_point::from_angle(a1);
        const proj_point y = proj_point::from_angle(a2);
        const double d = proj_distance(x, y);
        if (d <= 0.0)
            continue;
        q = std::fmax(q, std::fabs(f(x) - f(y)) / std::pow(d, alpha));
    }
    return q;
}

} // namespace

double gaussian_targets::cdf(double b) const {
    return 0.5 * std::erfc(-b / std::sqrt(2.0 * rho2));
}

double gaussian_targets::pdf(double b) const {
    return std::exp(-b * b / (2.0 * rho2)) / std::sqrt(2.0 * kPi * rho2);
}

double gaussian_targets::char_fn(double xi) const { return std::exp(-0.5 * rho2 * xi * xi); }

gaussian_targets make_gaussian_targets(double rho2) {
    if (!(rho2 > 0.0))
        throw degenerate_variance_error("gaussian_targets: rho2 must be positive");
    return gaussian_targets{rho2};
}

psi_target psi_one() {
    psi_target p;
    p.name = "one";
    p.f = [](double) { return 1.0; };
    p.left_limit = 1.0;
    p.norm_h = 1.0;
    return p;
}

psi_target psi_gauss_bump() {
    psi_target p;
    p.name = "gauss_bump";
    p.f = [](double t) { return std::exp(-0.5 * t * t); };
    p.left_limit = 0.0;
    p.norm_h = compute_norm_h(p.f);
    return p;
}

psi_target psi_clamped_linear() {
    psi_target p;
    p.name = "clamped_linear";
    p.f = [](double t) { return std::clamp(t, 0.0, 1.0); };
    p.left_limit = 0.0;
    p.norm_h = compute_norm_h(p.f);
    return p;
}

psi_target psi_triangle() {
    psi_target p;
    p.name = "triangle";
    p.f = [](double t) { return std::fmax(0.0, 1.0 - std::fabs(t)); };
    p.support_lo = -1.0;
    p.support_hi = 1.0;
    p.left_limit = 0.0;
    p.compact = true;
    p.norm_h = compute_norm_h(p.f);
    return p;
}

psi_target psi_by_name(const std::string& name) {
    if (name == "one")
        return psi_one();
    if (name == "gauss_bump")
        return psi_gauss_bump();
    if (name == "clamped_linear")
        return psi_clamped_linear();
    if (name == "triangle")
        return psi_triangle();
    throw config_error("unknown psi target: " + name);
}

phi_target phi_one() {
    phi_target p;
    p.name = "one";
    p.f = [](const proj_point&) { return 1.0; };
    p.alpha = 1.0;
    p.holder_quotient = 0.0;
    return p;
}

phi_target phi_cos2() {
    phi_target p;
    p.name = "cos2";
    // cos(2 theta) = a^2 - b^2 on the unit representative (a, b).
    p.f = [](const proj_point& x) {
        const double a = x.rep()[0], b = x.rep()[1];
        return 0.5 + 0.25 * (a * a - b * b);
    };
    p.alpha = 1.0;
    p.holder_quotient = sample_holder_quotient(p.f, p.alpha);
    return p;
}

phi_target phi_weierstrass() {
    phi_target p;
    p.name = "weierstrass";
    p.alpha = std::log(2.0) / std::log(3.0);
    p.f = [](const proj_point& x) {
        const double theta = x.angle();
        double acc = 0.0, amp = 1.0, total = 0.0, freq = 2.0;
        for (int k = 0; k < 5; ++k) {
            acc += amp * std::cos(freq * theta);
            total += amp;
            amp *= 0.5;
            freq *= 3.0;
        }
        return 0.5 + 0.25 * acc / total;
    };
    p.holder_quotient = sample_holder_quotient(p.f, p.alpha);
    return p;
}

phi_target phi_by_name(const std::string& name) {
    if (name == "one")
        return phi_one();
    if (name == "cos2")
        return phi_cos2();
    if (name == "weierstrass")
        return phi_weierstrass();
    throw config_error("unknown phi target: " + name);
}

bool interval::is_all() const { return lo == -kInf && hi == kInf; }
interval interval::all() { return interval{}; }
interval interval::up_to(double b) { return interval{-kInf, b}; }

nu_average nu_mean_phi(const std::vector<proj_point>& nu_samples, const phi_target& phi) {
    if (nu_samples.empty())
        throw empty_sample_error("nu_mean_phi: no samples");
    std::vector<double> vals;
    vals.reserve(nu_samples.size());
    for (const auto& x : nu_samples)
        vals.push_back(phi.f(x));
    const auto mv = mean_var(vals);
    return {mv.mean, stderr_of_mean(vals)};
}

nu_average nu_mean_phi(const spectral_data& sd, const phi_target& phi) {
    double acc = 0.0;
    const double h = kPi / static_cast<double>(sd.grid_m);
    for (std::size_t i = 0; i < sd.grid_m; ++i)
        acc += sd.nu_hat[i] * phi.f(proj_point::from_angle(static_cast<double>(i) * h));
    return {acc, 0.0};
}

nu_average nu_mean_phi(const walk_ensemble& ens, const phi_target& phi) {
    std::vector<double> vals;
    vals.reserve(ens.trials);
    for (std::size_t i = 0; i < ens.trials; ++i)
        vals.push_back(phi.f(ens.end_point(i)));
    const auto mv = mean_var(vals);
    return {mv.mean, stderr_of_mean(vals)};
}

mc_functional empirical_En(const walk_ensemble& ens, const admissible_fn& u,
                           const psi_target& psi, const interval& j, const phi_target& phi,
                           double gamma) {
    const double n = static_cast<double>(ens.n);
    const double root_n = std::sqrt(n);
    std::vector<double> vals(ens.trials);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ens.trials; ++i) {
        const proj_point x = ens.end_point(i);
        const ext_real uv = u(x);
        double arg;
        if (uv.finite())
            arg = (ens.sigma[i] + uv.value() - n * gamma) / root_n;
        else
            arg = uv.is_neg_inf() ? kFarLeft : -kFarLeft;
        const double pv = j.contains(arg) ? psi.f(arg) : 0.0;
        if (pv != 0.0)
            ++hits;
        vals[i] = pv * phi.f(x);
    }
    const auto mv = mean_var(vals);
    return {mv.mean, stderr_of_mean(vals), hits};
}

mc_functional empirical_En(const measure_spec& mu, const proj_point& x0,
                           const admissible_fn& u, const psi_target& psi, const interval& j,
                           const phi_target& phi, std::size_t n, std::size_t trials,
                           double gamma, std::uint64_t seed, int threads) {
    return empirical_En(run_ensemble(mu, x0, n, trials, seed, threads), u, psi, j, phi, gamma);
}

double prediction_R(const psi_target& psi, const interval& j, double phi_mean, double rho2) {
    if (!(rho2 > 0.0))
        throw degenerate_variance_error("prediction_R: rho2 must be positive");
    const double rho = std::sqrt(rho2);
    const double span = 10.0 * rho;
    auto weight = [&](double s) { return std::exp(-s * s / (2.0 * rho2)); };
    const double denom = simpson(weight, -span, span, 20000);
    const double a = std::fmax(j.lo, -span);
    const double b = std::fmin(j.hi, span);
    const double numer =
        simpson([&](double s) { return psi.f(s) * weight(s); }, a, b, 20000);
    return numer / denom * phi_mean;
}

be_result berry_esseen_stat(const walk_ensemble& ens, const admissible_fn& u,
                            const psi_target& psi, const interval& j, const phi_target& phi,
                            double gamma, double rho2, const nu_average& phi_mean) {
    be_result res;
    res.n = ens.n;
    const auto en = empirical_En(ens, u, psi, j, phi, gamma);
    res.en = en.mean;
    res.mc_se = en.se;
    res.r = prediction_R(psi, j, phi_mean.mean, rho2);
    res.r_se = std::fabs(prediction_R(psi, j, 1.0, rho2)) * phi_mean.se;
    res.discrepancy = std::fabs(res.en - res.r);
    res.scaled = std::sqrt(static_cast<double>(ens.n)) * res.discrepancy;
    return res;
}

namespace {

double psi_integral(const psi_target& psi) {
    if (!psi.compact)
        throw precondition_error("llt targets must be compactly supported");
    return simpson(psi.f, psi.support_lo, psi.support_hi, 20000);
}

} // namespace

llt_result llt_stat(const walk_ensemble& ens, const admissible_fn& u, const psi_target& psi,
                    const phi_target& phi, double t, double gamma, double rho2,
                    const nu_average& phi_mean) {
    if (!(rho2 > 0.0))
        throw degenerate_variance_error("llt_stat: rho2 must be positive");
    const double rho = std::sqrt(rho2);
    const double n = static_cast<double>(ens.n);
    llt_result res;
    res.n = ens.n;
    res.t = t;
    std::vector<double> vals(ens.trials);
    for (std::size_t i = 0; i < ens.trials; ++i) {
        const proj_point x = ens.end_point(i);
        const ext_real uv = u(x);
        double arg;
        if (uv.finite())
            arg = t + ens.sigma[i] + uv.value() - n * gamma;
        else
            arg = uv.is_neg_inf() ? kFarLeft : -kFarLeft;
        const double pv = psi.f(arg);
        if (pv != 0.0)
            ++res.hits;
        vals[i] = pv * phi.f(x);
    }
    const double scale = std::sqrt(2.0 * kPi * n) * rho;
    const auto mv = mean_var(vals);
    res.lhs = scale * mv.mean;
    res.lhs_se = scale * stderr_of_mean(vals);
    res.rhs = std::exp(-t * t / (2.0 * rho2 * n)) * psi_integral(psi) * phi_mean.mean;
    res.abs_err = std::fabs(res.lhs - res.rhs);
    res.low_hit_count = res.hits < 100;
    return res;
}

moderate_result llt_moderate(const measure_spec& mu, const proj_point& x0,
                             const admissible_fn& u, const psi_target& psi,
                             const phi_target& phi, double t, std::size_t n,
                             std::size_t trials, const cumulant_estimates& gammas,
                             const nu_average& phi_mean, std::uint64_t seed,
                             const circle_grid& grid, int threads, interp_order order) {
    const double gamma = gammas.value[1];
    const double gamma2 = gammas.value[2];
    if (!(gamma2 > 0.0))
        throw degenerate_variance_error("llt_moderate: gamma_2 must be positive");
    const double rho = std::sqrt(gamma2);
    const double root_n = std::sqrt(static_cast<double>(n));
    const double tau = t / root_n;
    if (std::fabs(tau) > 0.3)
        throw precondition_error("llt_moderate: requires |t| / sqrt(n) <= 0.3");

    moderate_result res;
    res.n = n;
    res.t = t;
    const double zeta = cramer_zeta(gamma2, gammas.value[3], gammas.value[4],
                                    gammas.value[5], tau);
    const double gauss_factor = std::exp(-0.5 * t * t + t * t * t / root_n * zeta);
    res.rhs = gauss_factor * psi_integral(psi) * phi_mean.mean;

    const double shift = static_cast<double>(n) * gamma + root_n * rho * t;
    const double scale = std::sqrt(2.0 * kPi * static_cast<double>(n)) * rho;

    std::vector<double> vals, weights;
    if (t == 0.0) {
        const auto ens = run_ensemble(mu, x0, n, trials, seed, threads);
        vals.resize(trials);
        for (std::size_t i = 0; i < trials; ++i) {
            const proj_point x = ens.end_point(i);
            const ext_real uv = u(x);
            const double arg = uv.finite()
                                   ? ens.sigma[i] + uv.value() - shift
                                   : (uv.is_neg_inf() ? kFarLeft : -kFarLeft);
            const double pv = psi.f(arg);
            if (pv != 0.0)
                ++res.hits;
            vals[i] = pv * phi.f(x);
        }
        res.s = 0.0;
        res.weight_mean = 1.0;
        res.weight_se = 0.0;
    } else {
        const double drift_target = gamma + rho * t / root_n;
        res.s = solve_tilt_parameter(mu, grid, drift_target, tau / rho, order);
        const auto sd = leading_eigen(build_operator(mu, res.s, grid, order));
        const auto tens = run_tilted_ensemble(mu, x0, n, trials, seed, res.s, sd, threads);
        vals.resize(trials);
        weights.resize(trials);
        for (std::size_t i = 0; i < trials; ++i) {
            weights[i] = std::exp(tens.log_weight[i]);
            const proj_point x = tens.end_point(i);
            const ext_real uv = u(x);
            const double arg = uv.finite()
                                   ? tens.sigma[i] + uv.value() - shift
                                   : (uv.is_neg_inf() ? kFarLeft : -kFarLeft);
            const double pv = psi.f(arg);
            if (pv != 0.0)
                ++res.hits;
            vals[i] = weights[i] * pv * phi.f(x);
        }
        const auto wm = mean_var(weights);
        res.weight_mean = wm.mean;
        res.weight_se = stderr_of_mean(weights);
    }
    const auto mv = mean_var(vals);
    res.lhs = scale * mv.mean;
    res.lhs_se = scale * stderr_of_mean(vals);
    res.ratio = res.rhs != 0.0 ? res.lhs / res.rhs : 0.0;
    res.low_hit_count = res.hits < 100;
    return res;
}

} // namespace coclab
