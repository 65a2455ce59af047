#pragma once

#include <functional>
#include <limits>
#include <string>

#include "coclab/admissible.hpp"
#include "coclab/transfer.hpp"

namespace coclab {

/// Gaussian comparison objects: cdf H, density h, characteristic function
/// h_hat(xi) = exp(-rho^2 xi^2 / 2) of N(0, rho^2).
struct gaussian_targets {
    double rho2 = 1.0;

    double cdf(double b) const;
    double pdf(double b) const;
    double char_fn(double xi) const;
};

gaussian_targets make_gaussian_targets(double rho2);

/// Scalar target psi on R with its recorded H-norm
/// ||psi||_inf + ||psi'||_inf + ||psi'||_L1.
struct psi_target {
    std::string name;
    std::function<double(double)> f;
    double support_lo = -std::numeric_limits<double>::infinity();
    double support_hi = std::numeric_limits<double>::infinity();
    double left_limit = 0.0; // lim_{t -> -inf} psi(t)
    double norm_h = 0.0;
    bool compact = false;
};

psi_target psi_one();
psi_target psi_gauss_bump();
psi_target psi_clamped_linear();
psi_target psi_triangle(); // compact, unit integral; the LLT window
psi_target psi_by_name(const std::string& name);

/// Projective target phi with Holder exponent and a sampled quotient.
struct phi_target {
    std::string name;
    std::function<double(const proj_point&)> f;
    double alpha = 1.0;
    double holder_quotient = 0.0;
};

phi_target phi_one();
phi_target phi_cos2();        // 1/2 + 1/4 cos(2 theta) on P^1
phi_target phi_weierstrass(); // rough Holder target, partial sum of a lacunary series
phi_target phi_by_name(const std::string& name);

struct interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double t) const { return t >= lo && t <= hi; }
    bool is_all() const;
    static interval all();
    static interval up_to(double b);
};

/// nu-average of phi with the Monte Carlo error of its source (zero for the
/// deterministic grid source).
struct nu_average {
    double mean = 0.0;
    double se = 0.0;
};

nu_average nu_mean_phi(const std::vector<proj_point>& nu_samples, const phi_target& phi);
nu_average nu_mean_phi(const spectral_data& sd, const phi_target& phi);
/// From an equilibrated i.i.d. ensemble of walk endpoints.
nu_average nu_mean_phi(const walk_ensemble& ens, const phi_target& phi);

struct mc_functional {
    double mean = 0.0;
    double se = 0.0;
    std::size_t hits = 0; // trials with a nonzero psi contribution
};

/// Monte Carlo E_n: mean over trials of
/// psi_J((sigma + u(S_n x) - n gamma)/sqrt(n)) phi(S_n x). Trials with
/// u = -inf contribute the left limit of psi_J.
mc_functional empirical_En(const walk_ensemble& ens, const admissible_fn& u,
                           const psi_target& psi, const interval& j, const phi_target& phi,
                           double gamma);
mc_functional empirical_En(const measure_spec& mu, const proj_point& x0,
                           const admissible_fn& u, const psi_target& psi, const interval& j,
                           const phi_target& phi, std::size_t n, std::size_t trials,
                           double gamma, std::uint64_t seed, int threads = 1);

/// Gaussian prediction R = (2 pi)^{-1/2} rho^{-1} int_J e^{-s^2/2rho^2}
/// psi(s) ds * mean_nu(phi). The s-integral is normalized by the quadrature
/// mass of the Gaussian itself, so psi = 1, J = R gives exactly 1.
double prediction_R(const psi_target& psi, const interval& j, double phi_mean, double rho2);

struct be_result {
    std::size_t n = 0;
    double en = 0.0;
    double r = 0.0;
    double discrepancy = 0.0; // |E_n - R|
    double scaled = 0.0;      // sqrt(n) |E_n - R|
    double mc_se = 0.0;       // Monte Carlo error of E_n
    double r_se = 0.0;        // Monte Carlo error of R's phi average
};

be_result berry_esseen_stat(const walk_ensemble& ens, const admissible_fn& u,
                            const psi_target& psi, const interval& j, const phi_target& phi,
                            double gamma, double rho2, const nu_average& phi_mean);

struct llt_result {
    std::size_t n = 0;
    double t = 0.0;
    double lhs = 0.0; // sqrt(2 pi n) rho E[Phi(t + sigma + u - n gamma, S_n x)]
    double rhs = 0.0; // e^{-t^2/(2 rho^2 n)} int psi * mean_nu(phi)
    double abs_err = 0.0;
    double lhs_se = 0.0;
    std::size_t hits = 0;
    bool low_hit_count = false; // fewer than 100 trials inside the window
};

llt_result llt_stat(const walk_ensemble& ens, const admissible_fn& u, const psi_target& psi,
                    const phi_target& phi, double t, double gamma, double rho2,
                    const nu_average& phi_mean);

struct moderate_result {
    std::size_t n = 0;
    double t = 0.0;
    double s = 0.0;    // tilt parameter (0 when t = 0: untilted path)
    double lhs = 0.0;  // sqrt(2 pi n) rho E[Phi(sigma + u - n gamma - sqrt(n) rho t, .)]
    double rhs = 0.0;  // e^{-t^2/2 + t^3/sqrt(n) zeta(t/sqrt(n))} int psi * mean_nu(phi)
    double ratio = 0.0;
    double lhs_se = 0.0;
    std::size_t hits = 0;
    bool low_hit_count = false;
    double weight_mean = 1.0; // tilt weights average to 1 in expectation
    double weight_se = 0.0;
};

/// Moderate-deviation LLT statistic. For t = 0 this is the llt_stat code
/// path (tilt factor 1, plain sampling). For t != 0 the walk is sampled
/// under the tilted path measure with Lambda'(s) = gamma + rho t / sqrt(n)
/// and reweighted, which populates the far window.
moderate_result llt_moderate(const measure_spec& mu, const proj_point& x0,
                             const admissible_fn& u, const psi_target& psi,
                             const phi_target& phi, double t, std::size_t n,
                             std::size_t trials, const cumulant_estimates& gammas,
                             const nu_average& phi_mean, std::uint64_t seed,
                             const circle_grid& grid, int threads = 1,
                             interp_order order = interp_order::linear);

} // namespace coclab
