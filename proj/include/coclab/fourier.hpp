#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace coclab {

/// Real function sampled on a uniform grid [t0, t0 + (count-1) step].
struct sampled_function {
    double t0 = 0.0;
    double step = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double t(std::size_t i) const { return t0 + static_cast<double>(i) * step; }
    double t_max() const { return values.empty() ? t0 : t(values.size() - 1); }

    /// Linear interpolation with constant extension beyond the grid.
    double at(double x) const;

    double trapezoid_integral() const;
    double sup_norm() const;
    /// Max finite-difference slope (Lipschitz surrogate).
    double lipschitz_estimate() const;

    static sampled_function from_function(double lo, double hi, double step,
                                          const std::function<double(double)>& f);
};

double l1_distance(const sampled_function& a, const sampled_function& b);
double sup_distance(const sampled_function& a, const sampled_function& b);

/// Smoothing kernel theta_delta(t) = delta^-2 theta(t/delta^2), built on the
/// Fejer-squared profile theta(t) = (3/8pi) sinc^4(t/4). The profile is
/// nonnegative with unit mass and its Fourier transform is an explicit
/// piecewise cubic supported exactly on [-1, 1], so theta_delta has Fourier
/// support exactly [-delta^-2, delta^-2].
struct smoothing_kernel {
    double delta = 1.0;
    sampled_function profile;     // theta_delta on [-T, T]
    sampled_function ft_profile;  // hat(theta_delta) sampled for inspection
    double tail_mass = 0.0;       // integral of theta_delta over |t| >= delta

    /// Closed-form base profile and transform.
    static double theta(double t);
    static double theta_hat(double xi);

    double theta_delta(double t) const;
    double theta_delta_hat(double xi) const;
};

smoothing_kernel make_kernel(double delta);

/// Discrete convolution psi * theta_delta evaluated on psi's grid. psi must
/// be Lipschitz with constant <= 1 (checked on the grid); the kernel grid
/// must not be finer than psi's.
sampled_function smooth(const sampled_function& psi, const smoothing_kernel& kernel);

/// Band-limited two-sided approximants psi_minus <= psi <= psi_plus with
/// Fourier support in [-delta^-2, delta^-2]: dilate/erode the support by
/// delta, mollify with theta_delta, pad by the kernel tail mass.
std::pair<sampled_function, sampled_function> approx_pm(const sampled_function& psi,
                                                        double delta);

/// Conjugate characteristic function (1/M) sum_j e^{-i xi X_j}.
std::complex<double> conj_char(const std::vector<double>& samples, double xi);

struct pv_result {
    double value = 0.0;    // (1/pi) sup_t |integral|
    double argmax_t = 0.0;
};

/// Numerical rendering of the Feller-type principal-value bound: for
/// Theta_t(xi) = e^{i t xi} (phi_F(xi) - h_hat(xi)) theta_delta_hat(xi),
/// evaluates (1/pi) sup over t of |int_0^{delta^-2} (Theta_t(xi) -
/// Theta_t(-xi))/xi d xi| with the removable singularity at 0 filled by the
/// symmetric difference limit.
pv_result pv_be_functional(const std::function<std::complex<double>(double)>& phi_f,
                           const std::function<std::complex<double>(double)>& h_hat,
                           const smoothing_kernel& kernel, const std::vector<double>& t_values,
                           std::size_t integration_nodes);

} // namespace coclab
