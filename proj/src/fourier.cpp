#include "coclab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coclab/errors.hpp"
#include "coclab/kernels.hpp"

namespace coclab {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
    if (std::fabs(x) < 1e-8)
        return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

} // namespace

double sampled_function::at(double x) const {
    if (values.empty())
        return 0.0;
    if (x <= t0)
        return values.front();
    const double pos = (x - t0) / step;
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= values.size())
        return values.back();
    const double u = pos - static_cast<double>(i);
    return values[i] * (1.0 - u) + values[i + 1] * u;
}

double sampled_function::trapezoid_integral() const {
    if (values.size() < 2)
        return 0.0;
    double acc = 0.5 * (values.front() + values.back());
    acc += kernels::sum(std::span(values).subspan(1, values.size() - 2));
    return acc * step;
}

double sampled_function::sup_norm() const {
    double m = 0.0;
    for (double v : values)
        m = std::fmax(m, std::fabs(v));
    return m;
}

double sampled_function::lipschitz_estimate() const {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        m = std::fmax(m, std::fabs(values[i + 1] - values[i]) / step);
    return m;
}

sampled_function sampled_function::from_function(double lo, double hi, double step,
                                                 const std::function<double(double)>& f) {
    sampled_function s;
    s.t0 = lo;
    s.step = step;
    const std::size_t count = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
    s.values.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        s.values[i] = f(s.t(i));
    return s;
}

double l1_distance(const sampled_function& a, const sampled_function& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        acc += std::fabs(a.values[i] - b.at(a.t(i)));
    return acc * a.step;
}

double sup_distance(const sampled_function& a, const sampled_function& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        acc = std::fmax(acc, std::fabs(a.values[i] - b.at(a.t(i))));
    return acc;
}

double smoothing_kernel::theta(double t) {
    const double s = sinc(t / 4.0);
    const double s2 = s * s;
    return 3.0 / (8.0 * kPi) * s2 * s2;
}

// Triangle self-convolution: piecewise cubic, support exactly [-1, 1].
double smoothing_kernel::theta_hat(double xi) {
    const double a = std::fabs(xi);
    if (a >= 1.0)
        return 0.0;
    if (a <= 0.5)
        return 6.0 * a * a * a - 6.0 * a * a + 1.0;
    const double r = 1.0 - a;
    return 2.0 * r * r * r;
}

double smoothing_kernel::theta_delta(double t) const {
    const double d2 = delta * delta;
    return theta(t / d2) / d2;
}

double smoothing_kernel::theta_delta_hat(double xi) const {
    return theta_hat(xi * delta * delta);
}

smoothing_kernel make_kernel(double delta) {
    if (!(delta > 0.0) || delta > 1.0)
        throw precondition_error("make_kernel: delta must lie in (0, 1]");
    smoothing_kernel k;
    k.delta = delta;
    const double d2 = delta * delta;
    // The quartic sinc tail needs a window of several hundred profile units
    // before the truncated mass drops below 1e-7.
    const double t_max = std::fmax(50.0 * delta, 500.0 * d2);
    const double step = d2 / 10.0;
    k.profile = sampled_function::from_function(
        -t_max, t_max, step, [&k](double t) { return k.theta_delta(t); });
    const double xi_max = 1.2 / d2;
    k.ft_profile = sampled_function::from_function(
        -xi_max, xi_max, xi_max / 400.0, [&k](double xi) { return k.theta_delta_hat(xi); });
    double tail = 0.0;
    for (std::size_t i = 0; i < k.profile.size(); ++i) {
        const double t = k.profile.t(i);
        if (std::fabs(t) >= delta) {
            const double w = (i == 0 || i + 1 == k.profile.size()) ? 0.5 : 1.0;
            tail += w * k.profile.values[i];
        }
    }
    k.tail_mass = tail * step;
    return k;
}

sampled_function smooth(const sampled_function& psi, const smoothing_kernel& kernel) {
    if (kernel.profile.step < psi.step - 1e-15)
        throw grid_mismatch_error("smooth: kernel grid is finer than psi grid");
    if (psi.lipschitz_estimate() > 1.0 + 1e-6)
        throw precondition_error("smooth: psi must be Lipschitz with constant <= 1");
    sampled_function out;
    out.t0 = psi.t0;
    out.step = psi.step;
    out.values.resize(psi.size());
    const auto& kv = kernel.profile.values;
    const double ks = kernel.profile.step;
    // Normalize by the discrete kernel mass so constants are fixed points.
    double mass = 0.0;
    for (std::size_t j = 0; j < kv.size(); ++j)
        mass += ((j == 0 || j + 1 == kv.size()) ? 0.5 : 1.0) * kv[j];
    mass *= ks;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double t = psi.t(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < kv.size(); ++j) {
            const double w = (j == 0 || j + 1 == kv.size()) ? 0.5 : 1.0;
            acc += w * kv[j] * psi.at(t - kernel.profile.t(j));
        }
        out.values[i] = acc * ks / mass;
    }
    return out;
}

std::pair<sampled_function, sampled_function> approx_pm(const sampled_function& psi,
                                                        double delta) {
    if (psi.sup_norm() > 1.0 + 1e-12)
        throw precondition_error("approx_pm: requires ||psi||_inf <= 1");
    const smoothing_kernel kernel = make_kernel(delta);
    const double reach = delta + kernel.profile.t_max();
    // The working grid resolves the band limit; psi is resampled onto it.
    const double step = delta * delta / 10.0;

    // Resample psi (zero-extended: compact support) on the working grid.
    const double lo = psi.t0 - reach;
    const double hi = psi.t_max() + reach;
    auto psi_ext = [&psi](double x) {
        if (x < psi.t0 || x > psi.t_max())
            return 0.0;
        return psi.at(x);
    };
    sampled_function base = sampled_function::from_function(lo, hi, step, psi_ext);

    // Sup/inf dilation of the support by delta (zero extension beyond).
    const std::size_t radius = static_cast<std::size_t>(std::ceil(delta / step));
    const std::size_t count = base.size();
    sampled_function dil = base, ero = base;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t a = i > radius ? i - radius : 0;
        const std::size_t b = std::min(count - 1, i + radius);
        double mx = 0.0, mn = 0.0; // zero extension participates in both
        for (std::size_t j = a; j <= b; ++j) {
            mx = std::fmax(mx, base.values[j]);
            mn = std::fmin(mn, base.values[j]);
        }
        dil.values[i] = mx;
        ero.values[i] = mn;
    }

    // Mollify with theta_delta sampled on the working grid; trapezoid rule.
    const double t_kernel = kernel.profile.t_max();
    const std::size_t k_half = static_cast<std::size_t>(std::ceil(t_kernel / step));
    std::vector<double> kv(2 * k_half + 1);
    for (std::size_t j = 0; j < kv.size(); ++j) {
        const double t = (static_cast<double>(j) - static_cast<double>(k_half)) * step;
        kv[j] = kernel.theta_delta(t);
    }
    double kmass = 0.0;
    for (std::size_t j = 0; j < kv.size(); ++j)
        kmass += ((j == 0 || j + 1 == kv.size()) ? 0.5 : 1.0) * kv[j];
    kmass *= step;

    auto convolve = [&](const sampled_function& f) {
        sampled_function out = f;
        for (std::size_t i = 0; i < count; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < kv.size(); ++j) {
                const double w = (j == 0 || j + 1 == kv.size()) ? 0.5 : 1.0;
                const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i) +
                                           static_cast<std::ptrdiff_t>(k_half) -
                                           static_cast<std::ptrdiff_t>(j);
                const double fv =
                    (idx < 0 || idx >= static_cast<std::ptrdiff_t>(count))
                        ? 0.0
                        : f.values[static_cast<std::size_t>(idx)];
                acc += w * kv[j] * fv;
            }
            out.values[i] = acc * step;
        }
        return out;
    };

    sampled_function plus = convolve(dil);
    sampled_function minus = convolve(ero);

    // Pad by the mass the mollifier puts outside the dilation radius plus the
    // quadrature defect, so the bracketing holds pointwise.
    const double pad = psi.sup_norm() * (2.0 * kernel.tail_mass + std::fabs(1.0 - kmass)) + 1e-12;
    for (auto& v : plus.values)
        v += pad;
    for (auto& v : minus.values)
        v -= pad;
    return {std::move(minus), std::move(plus)};
}

std::complex<double> conj_char(const std::vector<double>& samples, double xi) {
    if (samples.empty())
        throw empty_sample_error("conj_char: empty sample list");
    double re = 0.0, im = 0.0;
    for (double x : samples) {
        re += std::cos(xi * x);
        im -= std::sin(xi * x);
    }
    const double m = static_cast<double>(samples.size());
    return {re / m, im / m};
}

pv_result pv_be_functional(const std::function<std::complex<double>(double)>& phi_f,
                           const std::function<std::complex<double>(double)>& h_hat,
                           const smoothing_kernel& kernel, const std::vector<double>& t_values,
                           std::size_t integration_nodes) {
    if (integration_nodes < 8)
        throw precondition_error("pv_be_functional: too few integration nodes");
    const double xi_max = 1.0 / (kernel.delta * kernel.delta);
    const double dxi = xi_max / static_cast<double>(integration_nodes);

    // Precompute (phi_F - h_hat) * theta_hat at the nodes (both signs).
    std::vector<std::complex<double>> dpos(integration_nodes + 1), dneg(integration_nodes + 1);
    for (std::size_t j = 0; j <= integration_nodes; ++j) {
        const double xi = static_cast<double>(j) * dxi;
        const double w = kernel.theta_delta_hat(xi);
        dpos[j] = (phi_f(xi) - h_hat(xi)) * w;
        dneg[j] = (phi_f(-xi) - h_hat(-xi)) * w;
    }

    pv_result res;
    bool first = true;
    for (double t : t_values) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j <= integration_nodes; ++j) {
            const double xi = static_cast<double>(j) * dxi;
            std::complex<double> g;
            if (j == 0) {
                // Removable singularity: extend by the symmetric difference
                // at the first positive node.
                const double e = dxi;
                const std::complex<double> rot = std::exp(std::complex<double>(0.0, t * e));
                g = (rot * dpos[1] - std::conj(rot) * dneg[1]) / e;
            } else {
                const std::complex<double> rot = std::exp(std::complex<double>(0.0, t * xi));
                g = (rot * dpos[j] - std::conj(rot) * dneg[j]) / xi;
            }
            if (j <= 3 && std::abs(g) > 1e6)
                throw singularity_error(
                    "pv_be_functional: symmetrized integrand blows up near 0");
            const double w = (j == 0 || j == integration_nodes) ? 0.5 : 1.0;
            acc += w * g;
        }
        const double val = std::abs(acc) * dxi / kPi;
        if (first || val > res.value) {
            res.value = val;
            res.argmax_t = t;
            first = false;
        }
    }
    return res;
}

} // namespace coclab
