#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "coclab/randwalk.hpp"

namespace coclab {

/// Uniform angle grid on P^1 = [0, pi); node i sits at i*pi/m.
struct circle_grid {
    std::size_t m = 1024;

    explicit circle_grid(std::size_t nodes);
    double spacing() const;
    double angle(std::size_t i) const;
};

enum class interp_order { linear, cubic };

/// Discretization of the perturbed Markov operator P_z phi(x) =
/// sum_j p_j e^{z sigma(g_j, x)} phi(g_j x) on the angle grid. Row i holds
/// the interpolation weights at the image angles of node i, so applying the
/// matrix to a grid function approximates P_z. At z = 0 the rows sum to 1
/// exactly (the interpolation weights are a partition of unity).
class transfer_operator {
  public:
    transfer_operator(const measure_spec& mu, std::complex<double> z, circle_grid grid,
                      interp_order order = interp_order::linear);

    const circle_grid& grid() const { return grid_; }
    std::complex<double> z() const { return z_; }
    const measure_spec& measure() const { return *mu_; }
    interp_order order() const { return order_; }
    const std::vector<std::complex<double>>& dense() const { return a_; }

    void apply(const std::vector<std::complex<double>>& in,
               std::vector<std::complex<double>>& out) const;
    void apply_transpose(const std::vector<std::complex<double>>& in,
                         std::vector<std::complex<double>>& out) const;

  private:
    const measure_spec* mu_;
    std::complex<double> z_;
    circle_grid grid_;
    interp_order order_;
    std::vector<std::complex<double>> a_; // m x m row-major
};

transfer_operator build_operator(const measure_spec& mu, std::complex<double> z,
                                 const circle_grid& grid,
                                 interp_order order = interp_order::linear);

/// Leading spectral data of a discretized P_z: eigenvalue, eigenfunction
/// normalized against the discretized stationary measure, and the modulus
/// gap to the second eigenvalue.
struct spectral_data {
    std::complex<double> lambda;
    std::complex<double> lambda2;
    std::vector<std::complex<double>> r; // right eigenfunction, <nu_hat, r> = 1
    std::vector<double> nu_hat;          // left eigenvector at z = 0, nonneg, sums to 1
    double gap = 0.0;                    // |lambda2| / |lambda|
    double residual = 0.0;               // ||P_z r - lambda r||_inf
    double deflation_residual = 0.0;
    std::complex<double> z;
    std::size_t grid_m = 0;

    /// r_z at an arbitrary angle (linear interpolation, pi-periodic).
    std::complex<double> r_at(double angle) const;
    /// cdf of nu_hat at an angle (for KS comparisons).
    double nu_cdf(double angle) const;
};

spectral_data leading_eigen(const transfer_operator& op);

/// log lambda_s for real s (Perron eigenvalue is real positive).
double lambda_log_real(const measure_spec& mu, const circle_grid& grid, double s,
                       interp_order order = interp_order::linear);

/// Leading eigenvalue and its residual only (no nu_hat, no gap); the cheap
/// path for eigenvalue curves and finite-difference stencils.
std::pair<std::complex<double>, double> lambda_at(const measure_spec& mu,
                                                  const circle_grid& grid,
                                                  std::complex<double> z,
                                                  interp_order order = interp_order::linear);

struct expansion_row {
    double xi = 0.0;
    std::complex<double> lambda;
    double residual = 0.0;
};

struct expansion_report {
    std::vector<expansion_row> rows;
    double fitted_slope = 0.0; // log residual vs log xi; >= 2.5 expected
};

/// Residual of lambda_{i xi} against 1 + i gamma xi - (rho2 + gamma^2)/2 xi^2.
expansion_report lambda_expansion_check(const measure_spec& mu, const circle_grid& grid,
                                        const std::vector<double>& xi_grid, double gamma,
                                        double rho2,
                                        interp_order order = interp_order::linear);

struct cumulant_estimates {
    double value[6] = {0, 0, 0, 0, 0, 0};  // value[m] = Lambda^(m)(0), m = 1..5
    double error[6] = {0, 0, 0, 0, 0, 0};  // step-halving error estimates
    bool ill_conditioned[6] = {false, false, false, false, false, false};
};

/// gamma_m = Lambda^(m)(0) by central differences with Richardson
/// extrapolation on the stencil s in {-order h, ..., order h}.
cumulant_estimates lambda_real_derivatives(const measure_spec& mu, const circle_grid& grid,
                                           int order, double h,
                                           interp_order iorder = interp_order::linear);

/// Truncated Cramer series zeta(t) from gamma_2..gamma_5 (three terms).
double cramer_zeta(double gamma2, double gamma3, double gamma4, double gamma5, double t);

/// Tilt weight q_n^s(x0, S_n) = e^{s sigma} / lambda_s^n * r_s(S_n x0)/r_s(x0).
double tilt_weight(const spectral_data& sd, double s, const walk_record& walk,
                   const proj_point& x0);

struct scgf_report {
    double s = 0.0;
    double mc_value = 0.0;     // (1/n) log E[e^{s sigma}]
    double mc_stderr = 0.0;
    double lambda_log = 0.0;   // log lambda_s from the operator
    double tolerance = 0.0;    // max(3 stderr, 2/n)
    bool pass = false;
};

/// Monte Carlo cumulant generating function at horizon n vs log lambda_s.
scgf_report scgf_check(const measure_spec& mu, const proj_point& x0, double s, std::size_t n,
                       std::size_t trials, const spectral_data& sd_s, std::uint64_t seed,
                       int threads = 1);

struct decay_row {
    std::size_t n = 0;
    double sup_norm = 0.0;
};

struct decay_report {
    double xi = 0.0;
    std::vector<decay_row> rows;
    double rho_hat = 1.0;   // fitted geometric rate of ||P_{i xi}^n 1||_inf
    bool decays = false;    // rho_hat < 0.99; fails for arithmetic measures
};

/// Spectrum away from 0: iterate P_{i xi} on the constant function and fit
/// the geometric decay of the sup norm.
decay_report large_xi_decay(const measure_spec& mu, const circle_grid& grid, double xi,
                            const std::vector<std::size_t>& n_list,
                            interp_order order = interp_order::linear);

/// Ensemble drawn from the tilted path measure Q_s^x; log_weight holds
/// log(d mu^{(x) n} / d Q) per trial, so weighted means are unbiased for
/// expectations under mu and the weights themselves average to 1.
struct tilted_ensemble {
    std::size_t n = 0;
    std::size_t trials = 0;
    double s = 0.0;
    std::vector<double> sigma;
    std::vector<double> x_end; // trials * 2
    std::vector<double> log_weight;

    proj_point end_point(std::size_t trial) const;
};

tilted_ensemble run_tilted_ensemble(const measure_spec& mu, const proj_point& x0,
                                    std::size_t n, std::size_t trials, std::uint64_t seed,
                                    double s, const spectral_data& sd_s, int threads = 1);

/// Solve Lambda'(s) = target_drift by Newton iteration on a finite-difference
/// derivative; used to centre the tilted walk for moderate deviations.
double solve_tilt_parameter(const measure_spec& mu, const circle_grid& grid,
                            double target_drift, double s_hint,
                            interp_order order = interp_order::linear);

} // namespace coclab
