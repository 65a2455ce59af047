#include "coclab/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "coclab/errors.hpp"
#include "coclab/kernels.hpp"
#include "coclab/rng.hpp"
#include "coclab/stats.hpp"

namespace coclab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEigenTol = 1e-12;    // relative residual target
constexpr int kMaxEigenIter = 100000;

double wrap_to_half_circle(double angle) {
    if (angle < 0.0)
        angle += kPi;
    if (angle >= kPi)
        angle -= kPi;
    return angle;
}

double vec_norm(const std::vector<std::complex<double>>& v) {
    double acc = 0.0;
    for (const auto& c : v)
        acc += std::norm(c);
    return std::sqrt(acc);
}

std::complex<double> inner(const std::vector<std::complex<double>>& a,
                           const std::vector<std::complex<double>>& b) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::conj(a[i]) * b[i];
    return acc;
}

} // namespace

circle_grid::circle_grid(std::size_t nodes) : m(nodes) {
    if (m < 64)
        throw precondition_error("circle_grid: needs at least 64 nodes");
}

double circle_grid::spacing() const { return kPi / static_cast<double>(m); }

double circle_grid::angle(std::size_t i) const {
    return static_cast<double>(i) * spacing();
}

transfer_operator::transfer_operator(const measure_spec& mu, std::complex<double> z,
                                     circle_grid grid, interp_order order)
    : mu_(&mu), z_(z), grid_(grid), order_(order), a_(grid.m * grid.m, 0.0) {
    if (mu.dim() != 2)
        throw dimension_error("transfer_operator: spectral module supports d = 2 only");
    if (std::fabs(z.real()) > 1.0)
        throw precondition_error("transfer_operator: |Re z| must be <= 1");
    const std::size_t m = grid_.m;
    const double h = grid_.spacing();
    for (std::size_t i = 0; i < m; ++i) {
        const double theta = grid_.angle(i);
        const double c = std::cos(theta), s = std::sin(theta);
        for (const auto& [g, p] : mu.atoms()) {
            const matrix& mat = g.entries();
            const double w0 = mat(0, 0) * c + mat(0, 1) * s;
            const double w1 = mat(1, 0) * c + mat(1, 1) * s;
            const double n2 = w0 * w0 + w1 * w1;
            const double sigma = 0.5 * std::log(n2);
            const double image = wrap_to_half_circle(std::atan2(w1, w0));
            const std::complex<double> amp =
                p * std::exp(z * sigma);
            double pos = image / h;
            if (pos >= static_cast<double>(m))
                pos -= static_cast<double>(m);
            const std::size_t i0 = std::min<std::size_t>(static_cast<std::size_t>(pos), m - 1);
            const double u = pos - static_cast<double>(i0);
            if (order_ == interp_order::linear) {
                a_[i * m + i0] += amp * (1.0 - u);
                a_[i * m + (i0 + 1) % m] += amp * u;
            } else {
                // Catmull-Rom weights; they sum to 1 identically in u.
                const double u2 = u * u, u3 = u2 * u;
                const double w_m1 = 0.5 * (-u3 + 2.0 * u2 - u);
                const double w_0 = 0.5 * (3.0 * u3 - 5.0 * u2 + 2.0);
                const double w_p1 = 0.5 * (-3.0 * u3 + 4.0 * u2 + u);
                const double w_p2 = 0.5 * (u3 - u2);
                a_[i * m + (i0 + m - 1) % m] += amp * w_m1;
                a_[i * m + i0] += amp * w_0;
                a_[i * m + (i0 + 1) % m] += amp * w_p1;
                a_[i * m + (i0 + 2) % m] += amp * w_p2;
            }
        }
    }
}

void transfer_operator::apply(const std::vector<std::complex<double>>& in,
                              std::vector<std::complex<double>>& out) const {
    const std::size_t m = grid_.m;
    out.resize(m);
    kernels::zgemv(m, m, a_.data(), in.data(), out.data());
}

void transfer_operator::apply_transpose(const std::vector<std::complex<double>>& in,
                                        std::vector<std::complex<double>>& out) const {
    const std::size_t m = grid_.m;
    out.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        kernels::zaxpy(in[i], std::span(a_).subspan(i * m, m), out);
}

transfer_operator build_operator(const measure_spec& mu, std::complex<double> z,
                                 const circle_grid& grid, interp_order order) {
    return transfer_operator(mu, z, grid, order);
}

namespace {

struct eigen_core_result {
    std::complex<double> lambda;
    std::vector<std::complex<double>> v;
    double residual = 0.0;
};

template <typename Matvec>
eigen_core_result power_iteration(Matvec&& matvec, std::size_t m,
                                  std::vector<std::complex<double>> start,
                                  double tol_rel = kEigenTol) {
    std::vector<std::complex<double>> v = std::move(start);
    const double n0 = vec_norm(v);
    for (auto& c : v)
        c /= n0;
    std::vector<std::complex<double>> w(m);
    for (int it = 0; it < kMaxEigenIter; ++it) {
        matvec(v, w);
        const std::complex<double> lambda = inner(v, w);
        double resid = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            resid = std::fmax(resid, std::abs(w[i] - lambda * v[i]));
        if (resid <= std::fmax(tol_rel * std::abs(lambda), 1e-14))
            return {lambda, v, resid};
        const double nw = vec_norm(w);
        if (nw == 0.0)
            return {0.0, v, 0.0};
        for (std::size_t i = 0; i < m; ++i)
            v[i] = w[i] / nw;
    }
    throw no_convergence_error(
        "power iteration did not converge (gap ~ 0 or z outside the perturbative regime)");
}

// Rayleigh-Ritz on span{v, Mv}; rescues the deflated iteration when the
// second eigenvalue is a complex-conjugate pair of equal modulus.
template <typename Matvec>
eigen_core_result ritz2(Matvec&& matvec, const std::vector<std::complex<double>>& v) {
    const std::size_t m = v.size();
    std::vector<std::complex<double>> b1 = v;
    const double n1 = vec_norm(b1);
    for (auto& c : b1)
        c /= n1;
    std::vector<std::complex<double>> mb1(m);
    matvec(b1, mb1);
    std::vector<std::complex<double>> b2 = mb1;
    const std::complex<double> proj = inner(b1, b2);
    for (std::size_t i = 0; i < m; ++i)
        b2[i] -= proj * b1[i];
    const double n2 = vec_norm(b2);
    if (n2 < 1e-300)
        return {proj, b1, 0.0};
    for (auto& c : b2)
        c /= n2;
    std::vector<std::complex<double>> mb2(m);
    matvec(b2, mb2);
    const std::complex<double> t11 = inner(b1, mb1), t12 = inner(b1, mb2);
    const std::complex<double> t21 = inner(b2, mb1), t22 = inner(b2, mb2);
    const std::complex<double> tr = t11 + t22;
    const std::complex<double> disc = std::sqrt(tr * tr - 4.0 * (t11 * t22 - t12 * t21));
    const std::complex<double> th1 = 0.5 * (tr + disc), th2 = 0.5 * (tr - disc);
    const std::complex<double> theta = std::abs(th1) >= std::abs(th2) ? th1 : th2;
    // Ritz vector for theta: solve (T - theta) y = 0 in 2x2.
    std::complex<double> alpha, beta;
    if (std::abs(t12) > std::abs(theta - t11)) {
        alpha = t12;
        beta = theta - t11;
    } else {
        alpha = theta - t22;
        beta = t21;
    }
    std::vector<std::complex<double>> y(m);
    for (std::size_t i = 0; i < m; ++i)
        y[i] = alpha * b1[i] + beta * b2[i];
    const double ny = vec_norm(y);
    if (ny < 1e-300)
        return {theta, b1, std::abs(theta)};
    for (auto& c : y)
        c /= ny;
    std::vector<std::complex<double>> my(m);
    matvec(y, my);
    double resid = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        resid = std::fmax(resid, std::abs(my[i] - theta * y[i]));
    return {theta, y, resid};
}

std::vector<std::complex<double>> ones_start(std::size_t m) {
    return std::vector<std::complex<double>>(m, 1.0);
}

std::vector<std::complex<double>> wiggle_start(std::size_t m) {
    std::vector<std::complex<double>> v(m);
    for (std::size_t i = 0; i < m; ++i)
        v[i] = std::complex<double>(std::cos(2.0 * kPi * static_cast<double>(i) /
                                             static_cast<double>(m)),
                                    0.3 - 0.6 * static_cast<double>(i % 2));
    return v;
}

std::vector<double> stationary_left_vector(const transfer_operator& op0) {
    const std::size_t m = op0.grid().m;
    auto matvec = [&op0](const std::vector<std::complex<double>>& in,
                         std::vector<std::complex<double>>& out) {
        op0.apply_transpose(in, out);
    };
    const auto res = power_iteration(matvec, m, ones_start(m));
    std::vector<double> nu(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        nu[i] = std::fmax(res.v[i].real(), 0.0);
        total += nu[i];
    }
    if (total <= 0.0)
        throw no_convergence_error("stationary left vector collapsed to zero");
    for (auto& x : nu)
        x /= total;
    return nu;
}

} // namespace

std::complex<double> spectral_data::r_at(double angle) const {
    const std::size_t m = grid_m;
    const double h = kPi / static_cast<double>(m);
    double pos = wrap_to_half_circle(angle) / h;
    if (pos >= static_cast<double>(m))
        pos -= static_cast<double>(m);
    const std::size_t i0 = std::min<std::size_t>(static_cast<std::size_t>(pos), m - 1);
    const double u = pos - static_cast<double>(i0);
    return r[i0] * (1.0 - u) + r[(i0 + 1) % m] * u;
}

double spectral_data::nu_cdf(double angle) const {
    const std::size_t m = grid_m;
    const double h = kPi / static_cast<double>(m);
    const double a = std::clamp(wrap_to_half_circle(angle), 0.0, kPi);
    double acc = 0.0;
    const double pos = a / h;
    const std::size_t full = std::min<std::size_t>(static_cast<std::size_t>(pos), m);
    for (std::size_t i = 0; i < full; ++i)
        acc += nu_hat[i];
    if (full < m)
        acc += (pos - static_cast<double>(full)) * nu_hat[full];
    return std::fmin(acc, 1.0);
}

spectral_data leading_eigen(const transfer_operator& op) {
    if (std::fabs(op.z().imag()) > 0.5)
        throw precondition_error("leading_eigen: |Im z| must be <= 0.5");
    const std::size_t m = op.grid().m;
    auto matvec = [&op](const std::vector<std::complex<double>>& in,
                        std::vector<std::complex<double>>& out) { op.apply(in, out); };

    spectral_data sd;
    sd.z = op.z();
    sd.grid_m = m;

    auto right = power_iteration(matvec, m, ones_start(m));
    sd.lambda = right.lambda;
    sd.residual = right.residual;
    sd.r = std::move(right.v);

    if (std::abs(op.z()) == 0.0) {
        sd.nu_hat = stationary_left_vector(op);
    } else {
        const transfer_operator op0(op.measure(), 0.0, op.grid(), op.order());
        sd.nu_hat = stationary_left_vector(op0);
    }

    // Normalize <nu_hat, r> = 1 and refresh the residual at that scale.
    std::complex<double> pairing = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        pairing += sd.nu_hat[i] * sd.r[i];
    if (std::abs(pairing) < 1e-12)
        throw no_convergence_error("leading_eigen: eigenfunction pairs to zero against nu_hat");
    for (auto& c : sd.r)
        c /= pairing;
    {
        std::vector<std::complex<double>> pr(m);
        op.apply(sd.r, pr);
        double resid = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            resid = std::fmax(resid, std::abs(pr[i] - sd.lambda * sd.r[i]));
        sd.residual = resid;
    }

    // Left eigenvector of P_z for the Wielandt deflation.
    auto matvec_t = [&op](const std::vector<std::complex<double>>& in,
                          std::vector<std::complex<double>>& out) {
        op.apply_transpose(in, out);
    };
    auto left = power_iteration(matvec_t, m, ones_start(m));
    std::vector<std::complex<double>> l(m);
    for (std::size_t i = 0; i < m; ++i)
        l[i] = std::conj(left.v[i]); // apply_transpose iterates A^T; deflation wants l with l^H A = lambda l^H

    std::complex<double> lr = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        lr += std::conj(l[i]) * sd.r[i];
    if (std::abs(lr) < 1e-300)
        throw no_convergence_error("leading_eigen: degenerate left/right pairing");
    const std::complex<double> lam1 = sd.lambda;
    const std::vector<std::complex<double>>& r_ref = sd.r;
    auto deflated = [&](const std::vector<std::complex<double>>& in,
                        std::vector<std::complex<double>>& out) {
        op.apply(in, out);
        std::complex<double> lv = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            lv += std::conj(l[i]) * in[i];
        const std::complex<double> coeff = lam1 * lv / lr;
        for (std::size_t i = 0; i < m; ++i)
            out[i] -= coeff * r_ref[i];
    };

    // Second eigenvalue: plain deflated iteration, with a 2-dim Rayleigh-Ritz
    // rescue for conjugate pairs of equal modulus.
    const double tol2 = 1e-6 * std::abs(sd.lambda);
    std::vector<std::complex<double>> v = wiggle_start(m);
    {
        const double nv = vec_norm(v);
        for (auto& c : v)
            c /= nv;
    }
    std::vector<std::complex<double>> w(m);
    bool done = false;
    for (int it = 0; it < kMaxEigenIter && !done; ++it) {
        deflated(v, w);
        const std::complex<double> theta = inner(v, w);
        double resid = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            resid = std::fmax(resid, std::abs(w[i] - theta * v[i]));
        if (resid <= std::fmax(tol2, 1e-13)) {
            sd.lambda2 = theta;
            sd.deflation_residual = resid;
            done = true;
            break;
        }
        if (it >= 500 && it % 250 == 0) {
            const auto rz = ritz2(deflated, v);
            if (rz.residual <= std::fmax(tol2, 1e-13)) {
                sd.lambda2 = rz.lambda;
                sd.deflation_residual = rz.residual;
                done = true;
                break;
            }
        }
        const double nw = vec_norm(w);
        if (nw < 1e-300) {
            sd.lambda2 = 0.0;
            sd.deflation_residual = 0.0;
            done = true;
            break;
        }
        for (std::size_t i = 0; i < m; ++i)
            v[i] = w[i] / nw;
    }
    if (!done)
        throw no_convergence_error("second-eigenvalue iteration did not converge");
    sd.gap = std::abs(sd.lambda) > 0.0 ? std::abs(sd.lambda2) / std::abs(sd.lambda) : 0.0;
    return sd;
}

double lambda_log_real(const measure_spec& mu, const circle_grid& grid, double s,
                       interp_order order) {
    const transfer_operator op(mu, s, grid, order);
    auto matvec = [&op](const std::vector<std::complex<double>>& in,
                        std::vector<std::complex<double>>& out) { op.apply(in, out); };
    const auto res = power_iteration(matvec, grid.m, ones_start(grid.m));
    const double lam = res.lambda.real();
    if (!(lam > 0.0))
        throw no_convergence_error("lambda_log_real: Perron eigenvalue not positive");
    return std::log(lam);
}

std::pair<std::complex<double>, double> lambda_at(const measure_spec& mu,
                                                  const circle_grid& grid,
                                                  std::complex<double> z, interp_order order) {
    const transfer_operator op(mu, z, grid, order);
    auto matvec = [&op](const std::vector<std::complex<double>>& in,
                        std::vector<std::complex<double>>& out) { op.apply(in, out); };
    const auto res = power_iteration(matvec, grid.m, ones_start(grid.m));
    return {res.lambda, res.residual};
}

expansion_report lambda_expansion_check(const measure_spec& mu, const circle_grid& grid,
                                        const std::vector<double>& xi_grid, double gamma,
                                        double rho2, interp_order order) {
    if (xi_grid.size() < 8)
        throw precondition_error("lambda_expansion_check: need at least 8 xi values");
    for (double xi : xi_grid)
        if (xi == 0.0 || std::fabs(xi) > 0.3)
            throw precondition_error("lambda_expansion_check: xi must lie in [-0.3, 0.3] \\ {0}");
    expansion_report rep;
    std::vector<double> log_xi, log_res;
    const double second = 0.5 * (rho2 + gamma * gamma);
    for (double xi : xi_grid) {
        const transfer_operator op(mu, std::complex<double>(0.0, xi), grid, order);
        auto matvec = [&op](const std::vector<std::complex<double>>& in,
                            std::vector<std::complex<double>>& out) { op.apply(in, out); };
        const auto res = power_iteration(matvec, grid.m, ones_start(grid.m));
        expansion_row row;
        row.xi = xi;
        row.lambda = res.lambda;
        const std::complex<double> taylor(1.0 - second * xi * xi, gamma * xi);
        row.residual = std::abs(res.lambda - taylor);
        rep.rows.push_back(row);
        if (row.residual > 0.0) {
            log_xi.push_back(std::log(std::fabs(xi)));
            log_res.push_back(std::log(row.residual));
        }
    }
    rep.fitted_slope = fit_line(log_xi, log_res).slope;
    return rep;
}

cumulant_estimates lambda_real_derivatives(const measure_spec& mu, const circle_grid& grid,
                                           int order, double h, interp_order iorder) {
    if (order < 1 || order > 5)
        throw precondition_error("lambda_real_derivatives: order must be in 1..5");
    if (h < 1e-3 || h > 5e-2)
        throw precondition_error("lambda_real_derivatives: h must be in [1e-3, 5e-2]");

    // Lambda on the union stencil {j h/2}. Only the offsets the requested
    // derivative orders touch are evaluated (each one is an eigensolve).
    double g[13] = {0};
    auto needed = [order](int j) {
        const int a = std::abs(j);
        if (a <= 2)
            return true;
        if (a == 4)
            return order >= 3;
        if (a == 3 || a == 6)
            return order >= 5;
        return false;
    };
    auto val = [&](int j) -> double& { return g[j + 6]; };
    for (int j = -6; j <= 6; ++j)
        if (needed(j))
            val(j) = lambda_log_real(mu, grid, static_cast<double>(j) * h * 0.5, iorder);

    auto stencil = [&](int m_order, double step, int scale) -> double {
        // scale = 2 for stride h (j even), 1 for stride h/2.
        auto f = [&](int k) { return val(k * scale); };
        switch (m_order) {
        case 1:
            return (f(1) - f(-1)) / (2.0 * step);
        case 2:
            return (f(1) - 2.0 * f(0) + f(-1)) / (step * step);
        case 3:
            return (f(2) - 2.0 * f(1) + 2.0 * f(-1) - f(-2)) / (2.0 * step * step * step);
        case 4:
            return (f(2) - 4.0 * f(1) + 6.0 * f(0) - 4.0 * f(-1) + f(-2)) /
                   (step * step * step * step);
        case 5:
            return (f(3) - 4.0 * f(2) + 5.0 * f(1) - 5.0 * f(-1) + 4.0 * f(-2) - f(-3)) /
                   (2.0 * step * step * step * step * step);
        default:
            return 0.0;
        }
    };

    cumulant_estimates est;
    for (int m_order = 1; m_order <= order; ++m_order) {
        const double coarse = stencil(m_order, h, 2);
        const double fine = stencil(m_order, 0.5 * h, 1);
        est.value[m_order] = (4.0 * fine - coarse) / 3.0; // O(h^2) -> O(h^4)
        est.error[m_order] = std::fabs(fine - coarse) / 3.0;
        est.ill_conditioned[m_order] =
            est.error[m_order] > 0.1 * std::fmax(std::fabs(est.value[m_order]), 1e-6);
    }
    return est;
}

double cramer_zeta(double gamma2, double gamma3, double gamma4, double gamma5, double t) {
    if (!(gamma2 > 0.0))
        throw degenerate_variance_error("cramer_zeta: gamma_2 must be positive");
    const double c0 = gamma3 / (6.0 * std::pow(gamma2, 1.5));
    const double c1 = (gamma4 * gamma2 - 3.0 * gamma3 * gamma3) / (24.0 * std::pow(gamma2, 3.0));
    const double c2 = (gamma5 * gamma2 * gamma2 - 10.0 * gamma4 * gamma3 * gamma2 +
                       15.0 * gamma3 * gamma3 * gamma3) /
                      (120.0 * std::pow(gamma2, 4.5));
    return c0 + c1 * t + c2 * t * t;
}

double tilt_weight(const spectral_data& sd, double s, const walk_record& walk,
                   const proj_point& x0) {
    if (std::fabs(s) > 0.5)
        throw precondition_error("tilt_weight: |s| must be <= 0.5");
    const double lam = sd.lambda.real();
    if (!(lam > 0.0))
        throw degenerate_variance_error("tilt_weight: lambda_s not positive");
    const double r_end = sd.r_at(walk.x_end.angle()).real();
    const double r_start = sd.r_at(x0.angle()).real();
    if (!(r_end > 0.0) || !(r_start > 0.0))
        throw degenerate_variance_error("tilt_weight: eigenfunction not positive");
    const double log_q = s * walk.sigma - static_cast<double>(walk.n) * std::log(lam) +
                         std::log(r_end) - std::log(r_start);
    return std::exp(log_q);
}

scgf_report scgf_check(const measure_spec& mu, const proj_point& x0, double s, std::size_t n,
                       std::size_t trials, const spectral_data& sd_s, std::uint64_t seed,
                       int threads) {
    if (std::fabs(s) > 0.3)
        throw precondition_error("scgf_check: |s| must be <= 0.3");
    const auto ens = run_ensemble(mu, x0, n, trials, seed, threads);
    double peak = -1e300;
    for (double sig : ens.sigma)
        peak = std::fmax(peak, s * sig);
    std::vector<double> w(trials);
    for (std::size_t i = 0; i < trials; ++i)
        w[i] = std::exp(s * ens.sigma[i] - peak);
    const auto mv = mean_var(w);
    scgf_report rep;
    rep.s = s;
    rep.mc_value = (peak + std::log(mv.mean)) / static_cast<double>(n);
    const double se_mean = std::sqrt(mv.var / static_cast<double>(trials));
    rep.mc_stderr = se_mean / mv.mean / static_cast<double>(n);
    rep.lambda_log = std::log(sd_s.lambda.real());
    rep.tolerance = std::fmax(3.0 * rep.mc_stderr, 2.0 / static_cast<double>(n));
    rep.pass = std::fabs(rep.mc_value - rep.lambda_log) <= rep.tolerance;
    return rep;
}

decay_report large_xi_decay(const measure_spec& mu, const circle_grid& grid, double xi,
                            const std::vector<std::size_t>& n_list, interp_order order) {
    if (std::fabs(xi) < 0.5 || std::fabs(xi) > 20.0)
        throw precondition_error("large_xi_decay: |xi| must lie in [0.5, 20]");
    decay_report rep;
    rep.xi = xi;
    if (n_list.empty())
        return rep;
    const transfer_operator op(mu, std::complex<double>(0.0, xi), grid, order);
    std::vector<std::size_t> sorted = n_list;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::complex<double>> f(grid.m, 1.0), tmp(grid.m);
    std::size_t current = 0;
    std::vector<double> xs, ys;
    for (std::size_t target : sorted) {
        while (current < target) {
            op.apply(f, tmp);
            f.swap(tmp);
            ++current;
        }
        double sup = 0.0;
        for (const auto& c : f)
            sup = std::fmax(sup, std::abs(c));
        rep.rows.push_back({target, sup});
        if (sup > 0.0 && target > 0) {
            xs.push_back(static_cast<double>(target));
            ys.push_back(std::log(sup));
        }
    }
    if (xs.size() >= 2)
        rep.rho_hat = std::exp(fit_line(xs, ys).slope);
    else
        rep.rho_hat = 1.0;
    rep.decays = rep.rho_hat < 0.99;
    return rep;
}

proj_point tilted_ensemble::end_point(std::size_t trial) const {
    return proj_point({x_end[2 * trial], x_end[2 * trial + 1]});
}

tilted_ensemble run_tilted_ensemble(const measure_spec& mu, const proj_point& x0,
                                    std::size_t n, std::size_t trials, std::uint64_t seed,
                                    double s, const spectral_data& sd_s, int threads) {
    if (mu.dim() != 2)
        throw dimension_error("run_tilted_ensemble: tilted sampling needs d = 2");
    tilted_ensemble ens;
    ens.n = n;
    ens.trials = trials;
    ens.s = s;
    ens.sigma.resize(trials);
    ens.x_end.resize(2 * trials);
    ens.log_weight.resize(trials);

    const std::size_t natoms = mu.atom_count();
    const double x0a = x0.rep()[0], x0b = x0.rep()[1];

    auto run_range = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> w0(natoms), w1(natoms), sig(natoms), rv(natoms), wt(natoms);
        for (std::size_t t = lo; t < hi; ++t) {
            rng_stream rng(seed, t);
            double va = x0a, vb = x0b;
            double sigma = 0.0, logw = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                double z_total = 0.0;
                for (std::size_t j = 0; j < natoms; ++j) {
                    const matrix& a = mu.atoms()[j].first.entries();
                    const double p = mu.atoms()[j].second;
                    w0[j] = a(0, 0) * va + a(0, 1) * vb;
                    w1[j] = a(1, 0) * va + a(1, 1) * vb;
                    const double n2 = w0[j] * w0[j] + w1[j] * w1[j];
                    sig[j] = 0.5 * std::log(n2);
                    const double ang = wrap_to_half_circle(std::atan2(w1[j], w0[j]));
                    rv[j] = std::fmax(sd_s.r_at(ang).real(), 1e-300);
                    wt[j] = p * std::exp(s * sig[j]) * rv[j];
                    z_total += wt[j];
                }
                const double u = rng.u01() * z_total;
                std::size_t pick = natoms - 1;
                double acc = 0.0;
                for (std::size_t j = 0; j < natoms; ++j) {
                    acc += wt[j];
                    if (u < acc) {
                        pick = j;
                        break;
                    }
                }
                logw += std::log(z_total) - s * sig[pick] - std::log(rv[pick]);
                sigma += sig[pick];
                const double inv = std::exp(-sig[pick]);
                va = w0[pick] * inv;
                vb = w1[pick] * inv;
            }
            ens.sigma[t] = sigma;
            ens.x_end[2 * t] = va;
            ens.x_end[2 * t + 1] = vb;
            ens.log_weight[t] = logw;
        }
    };

    const int k = std::max(1, threads);
    if (k == 1 || trials < 2) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk =
            (trials + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k);
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
    return ens;
}

double solve_tilt_parameter(const measure_spec& mu, const circle_grid& grid,
                            double target_drift, double s_hint, interp_order order) {
    const double fd_h = 5e-4;
    auto lambda_prime = [&](double s) {
        return (lambda_log_real(mu, grid, s + fd_h, order) -
                lambda_log_real(mu, grid, s - fd_h, order)) /
               (2.0 * fd_h);
    };
    double s0 = std::clamp(s_hint, -0.45, 0.45);
    double s1 = std::clamp(s0 + (s0 >= 0.0 ? 0.02 : -0.02), -0.45, 0.45);
    double f0 = lambda_prime(s0) - target_drift;
    double f1 = lambda_prime(s1) - target_drift;
    for (int it = 0; it < 40; ++it) {
        if (std::fabs(f1) < 1e-10)
            return s1;
        const double denom = f1 - f0;
        if (denom == 0.0)
            break;
        double s2 = std::clamp(s1 - f1 * (s1 - s0) / denom, -0.49, 0.49);
        s0 = s1;
        f0 = f1;
        s1 = s2;
        f1 = lambda_prime(s1) - target_drift;
    }
    if (std::fabs(f1) > 1e-6)
        throw no_convergence_error("solve_tilt_parameter: drift equation did not converge");
    return s1;
}

} // namespace coclab
