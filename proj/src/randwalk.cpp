#include "coclab/randwalk.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "coclab/errors.hpp"
#include "coclab/rng.hpp"
#include "coclab/stats.hpp"

namespace coclab {

measure_spec::measure_spec(std::vector<std::pair<group_element, double>> atoms)
    : atoms_(std::move(atoms)) {
    if (atoms_.empty())
        throw config_error("measure_spec: needs at least one atom");
    dim_ = atoms_.front().first.dim();
    double total = 0.0;
    max_log_norm_ = 0.0;
    cumulative_.reserve(atoms_.size());
    for (const auto& [g, p] : atoms_) {
        if (g.dim() != dim_)
            throw dimension_error("measure_spec: atoms of mixed dimension");
        if (!(p > 0.0))
            throw config_error("measure_spec: atom probabilities must be positive");
        total += p;
        cumulative_.push_back(total);
        max_log_norm_ = std::fmax(max_log_norm_, std::log(g.norm_n()));
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw config_error("measure_spec: probabilities must sum to 1 within 1e-12");
    cumulative_.back() = 1.0;
}

std::size_t measure_spec::sample_atom(double u) const {
    for (std::size_t j = 0; j + 1 < cumulative_.size(); ++j)
        if (u < cumulative_[j])
            return j;
    return cumulative_.size() - 1;
}

namespace {

// Core loop shared by every sampler. The direction vector is renormalized
// each step; log-norm factors are flushed into sigma every 64 steps, which
// keeps the running product well inside double range (N(g)^128 per flush).
struct walk_state {
    std::vector<double> v;
    std::vector<double> w;
    double sigma = 0.0;
    double norm2_product = 1.0;
    int pending = 0;

    explicit walk_state(const std::vector<double>& start) : v(start), w(start.size(), 0.0) {}

    void step(const measure_spec& mu, std::size_t atom) {
        const matrix& a = mu.atoms()[atom].first.entries();
        const std::size_t d = v.size();
        for (std::size_t i = 0; i < d; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                acc += a(i, j) * v[j];
            w[i] = acc;
        }
        double n2 = 0.0;
        for (double c : w)
            n2 += c * c;
        norm2_product *= n2;
        const double inv = 1.0 / std::sqrt(n2);
        for (std::size_t i = 0; i < d; ++i)
            v[i] = w[i] * inv;
        if (++pending == 64)
            flush();
    }

    void flush() {
        if (pending == 0)
            return;
        sigma += 0.5 * std::log(norm2_product);
        norm2_product = 1.0;
        pending = 0;
    }
};

void run_one(const measure_spec& mu, const std::vector<double>& start, std::size_t n,
             rng_stream& rng, double& sigma_out, std::vector<double>& v_out) {
    walk_state st(start);
    for (std::size_t k = 0; k < n; ++k)
        st.step(mu, mu.sample_atom(rng.u01()));
    st.flush();
    sigma_out = st.sigma;
    v_out = st.v;
}

void parallel_trials(std::size_t trials, int threads,
                     const std::function<void(std::size_t, std::size_t)>& run_range) {
    const int k = std::max(1, threads);
    if (k == 1 || trials < 2) {
        run_range(0, trials);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (trials + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k);
    for (int t = 0; t < k; ++t) {
        const std::size_t lo = std::min(trials, static_cast<std::size_t>(t) * chunk);
        const std::size_t hi = std::min(trials, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([&run_range, lo, hi] { run_range(lo, hi); });
    }
    for (auto& th : pool)
        th.join();
}

} // namespace

walk_record run_walk(const measure_spec& mu, const proj_point& x0, std::size_t n,
                     std::uint64_t seed) {
    if (x0.dim() != mu.dim())
        throw dimension_error("run_walk: start point dimension mismatch");
    rng_stream rng(seed, 0);
    double sigma = 0.0;
    std::vector<double> v;
    run_one(mu, x0.rep(), n, rng, sigma, v);
    return walk_record{n, sigma, proj_point(std::move(v)), seed};
}

proj_point walk_ensemble::end_point(std::size_t trial) const {
    std::vector<double> v(x_end.begin() + static_cast<std::ptrdiff_t>(trial * dim),
                          x_end.begin() + static_cast<std::ptrdiff_t>((trial + 1) * dim));
    return proj_point(std::move(v));
}

walk_ensemble run_ensemble(const measure_spec& mu, const proj_point& x0, std::size_t n,
                           std::size_t trials, std::uint64_t seed, int threads) {
    if (x0.dim() != mu.dim())
        throw dimension_error("run_ensemble: start point dimension mismatch");
    walk_ensemble ens;
    ens.n = n;
    ens.trials = trials;
    ens.dim = mu.dim();
    ens.seed = seed;
    ens.sigma.resize(trials);
    ens.x_end.resize(trials * mu.dim());
    const std::vector<double> start = x0.rep();
    parallel_trials(trials, threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> v;
        for (std::size_t i = lo; i < hi; ++i) {
            rng_stream rng(seed, i);
            run_one(mu, start, n, rng, ens.sigma[i], v);
            std::copy(v.begin(), v.end(), ens.x_end.begin() + static_cast<std::ptrdiff_t>(i * ens.dim));
        }
    });
    return ens;
}

lyapunov_estimate estimate_from_ensemble(const walk_ensemble& ens) {
    if (ens.n < 1 || ens.trials < 2)
        throw precondition_error("estimate_gamma_rho2: horizon and trials too small");
    lyapunov_estimate est;
    est.trials = ens.trials;
    est.horizon = ens.n;
    const double n = static_cast<double>(ens.n);
    const auto mv = mean_var(ens.sigma);
    est.gamma_hat = mv.mean / n;
    est.rho2_hat = mv.var / n;
    est.degenerate_variance = est.rho2_hat < 1e-12;

    // Batch means: up to 64 batches with at least 4 trials each.
    const std::size_t batches =
        std::min<std::size_t>(64, std::max<std::size_t>(2, ens.trials / 4));
    const std::size_t per = ens.trials / batches;
    std::vector<double> bmean(batches), bvar(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t lo = b * per;
        const std::size_t hi = (b + 1 == batches) ? ens.trials : lo + per;
        const auto bm = mean_var(std::span<const double>(ens.sigma).subspan(lo, hi - lo));
        bmean[b] = bm.mean / n;
        bvar[b] = bm.var / n;
    }
    est.stderr_gamma = stderr_of_mean(bmean);
    est.stderr_rho2 = stderr_of_mean(bvar);
    return est;
}

lyapunov_estimate estimate_gamma_rho2(const measure_spec& mu, const proj_point& x0,
                                      std::size_t n, std::size_t trials, std::uint64_t seed,
                                      int threads) {
    if (n < 100 || trials < 100)
        throw precondition_error("estimate_gamma_rho2: requires n >= 100 and trials >= 100");
    return estimate_from_ensemble(run_ensemble(mu, x0, n, trials, seed, threads));
}

std::vector<proj_point> empirical_stationary(const measure_spec& mu, const proj_point& x0,
                                             std::size_t burnin, std::size_t samples,
                                             std::uint64_t seed) {
    if (burnin < 1000)
        throw precondition_error("empirical_stationary: burnin must be >= 1000");
    rng_stream rng(seed, 0);
    walk_state st(x0.rep());
    for (std::size_t k = 0; k < burnin; ++k)
        st.step(mu, mu.sample_atom(rng.u01()));
    std::vector<proj_point> out;
    out.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        st.step(mu, mu.sample_atom(rng.u01()));
        out.push_back(proj_point(st.v));
    }
    return out;
}

regularity_fit_result regularity_fit(const std::vector<proj_point>& nu_samples,
                                     const dual_proj_point& y,
                                     const std::vector<double>& radii) {
    if (radii.size() < 4)
        throw precondition_error("regularity_fit: need at least 4 radii");
    for (double r : radii)
        if (!(r > 0.0) || r > 1.0)
            throw precondition_error("regularity_fit: radii must lie in (0, 1]");
    double rmin = radii.front(), rmax = radii.front();
    for (double r : radii) {
        rmin = std::fmin(rmin, r);
        rmax = std::fmax(rmax, r);
    }
    if (rmax / rmin < 100.0)
        throw precondition_error("regularity_fit: radii must span at least two decades");

    // d(x, H_y) equals delta(x, y); one pass gives every ball count.
    std::vector<double> dist;
    dist.reserve(nu_samples.size());
    for (const auto& x : nu_samples)
        dist.push_back(delta(x, y));

    std::vector<double> log_r, log_mass;
    std::size_t largest_count = 0;
    for (double r : radii) {
        std::size_t count = 0;
        for (double d : dist)
            if (d < r)
                ++count;
        if (r == rmax)
            largest_count = count;
        if (count > 0) {
            log_r.push_back(std::log(r));
            log_mass.push_back(std::log(static_cast<double>(count) /
                                        static_cast<double>(nu_samples.size())));
        }
    }
    if (largest_count < 50)
        throw insufficient_mass_error(
            "regularity_fit: fewer than 50 samples in the largest ball");

    regularity_fit_result res;
    res.degenerate = log_r.size() < radii.size() || log_r.size() < 2;
    if (log_r.size() >= 2) {
        const auto fit = fit_line(log_r, log_mass);
        res.eta_hat = fit.slope;
        res.c_hat = std::exp(fit.intercept);
        res.r2 = fit.r2;
        if (!(res.eta_hat > 0.0))
            res.degenerate = true;
    }
    return res;
}

std::vector<ldt_row> ldt_probe(const measure_spec& mu, const proj_point& x0, double gamma,
                               double epsilon, const std::vector<std::size_t>& n_list,
                               std::size_t trials, std::uint64_t seed, int threads) {
    if (!(epsilon > 0.0))
        throw precondition_error("ldt_probe: epsilon must be positive");
    std::vector<ldt_row> table;
    table.reserve(n_list.size());
    std::uint64_t salt = 0;
    for (std::size_t n : n_list) {
        ldt_row row;
        row.n = n;
        row.trials = trials;
        if (trials > 0) {
            const auto ens = run_ensemble(mu, x0, n, trials, seed ^ mix64(salt), threads);
            const double thr = static_cast<double>(n) * epsilon;
            const double center = static_cast<double>(n) * gamma;
            // No deviation is possible at n = 0 (the threshold degenerates).
            if (thr > 0.0)
                for (double s : ens.sigma)
                    if (std::fabs(s - center) >= thr)
                        ++row.hits;
            row.p_hat = static_cast<double>(row.hits) / static_cast<double>(trials);
            row.upper99 = wilson_upper(row.hits, trials, 2.5758293035489004);
        }
        table.push_back(row);
        ++salt;
    }
    return table;
}

proximality_report proximality_diagnostic(const measure_spec& mu, std::size_t n,
                                          std::uint64_t seed) {
    // QR (Benettin) accumulation: push an orthonormal 2-frame through the
    // product and collect the log growth of the two columns. The difference
    // tracks log(s1/s2) of S_n without ever forming the huge product.
    rng_stream rng(seed, 0);
    const std::size_t d = mu.dim();
    std::vector<double> q1(d, 0.0), q2(d, 0.0);
    q1[0] = 1.0;
    q2[d > 1 ? 1 : 0] = 1.0;
    double log1 = 0.0, log2 = 0.0;
    proximality_report rep;
    for (std::size_t k = 0; k < n; ++k) {
        const matrix& g = mu.atoms()[mu.sample_atom(rng.u01())].first.entries();
        std::vector<double> w1 = g.apply(q1);
        std::vector<double> w2 = g.apply(q2);
        double n1 = 0.0;
        for (double c : w1)
            n1 += c * c;
        n1 = std::sqrt(n1);
        log1 += std::log(n1);
        for (std::size_t i = 0; i < d; ++i)
            q1[i] = w1[i] / n1;
        double proj = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            proj += q1[i] * w2[i];
        double n2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            w2[i] -= proj * q1[i];
            n2 += w2[i] * w2[i];
        }
        n2 = std::sqrt(n2);
        if (n2 <= 0.0)
            throw singular_input_error("proximality_diagnostic: frame collapsed");
        log2 += std::log(n2);
        for (std::size_t i = 0; i < d; ++i)
            q2[i] = w2[i] / n2;
        if (k + 1 == n / 2)
            rep.log_sv_gap_mid = log1 - log2;
    }
    rep.log_sv_gap_end = log1 - log2;
    rep.gap_grows = rep.log_sv_gap_end > rep.log_sv_gap_mid + 1e-9;
    return rep;
}

} // namespace coclab
