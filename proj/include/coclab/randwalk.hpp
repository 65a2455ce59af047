#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coclab/projgeom.hpp"

namespace coclab {

/// Finitely supported probability measure on GL_d(R); the walk generator.
class measure_spec {
  public:
    measure_spec(std::vector<std::pair<group_element, double>> atoms);

    const std::vector<std::pair<group_element, double>>& atoms() const { return atoms_; }
    std::size_t dim() const { return dim_; }
    std::size_t atom_count() const { return atoms_.size(); }

    /// Largest log N(g) over the support; deterministic bound on |sigma|/n.
    double max_log_norm() const { return max_log_norm_; }

    /// Pick an atom index from a uniform draw in [0, 1).
    std::size_t sample_atom(double u) const;

  private:
    std::vector<std::pair<group_element, double>> atoms_;
    std::vector<double> cumulative_;
    std::size_t dim_;
    double max_log_norm_;
};

/// One realized walk: S_n = g_n ... g_1 applied to x0, with the accumulated
/// cocycle. Reproducible: identical inputs give a bit-identical record.
struct walk_record {
    std::size_t n = 0;
    double sigma = 0.0;
    proj_point x_end;
    std::uint64_t seed = 0;
};

walk_record run_walk(const measure_spec& mu, const proj_point& x0, std::size_t n,
                     std::uint64_t seed);

/// Independent walks sharing (mu, x0, n); trial i uses the stream derived
/// from (seed, i), so results are independent of the degree of parallelism.
struct walk_ensemble {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::vector<double> sigma;  // trials
    std::vector<double> x_end;  // trials * dim, row per trial

    proj_point end_point(std::size_t trial) const;
};

walk_ensemble run_ensemble(const measure_spec& mu, const proj_point& x0, std::size_t n,
                           std::size_t trials, std::uint64_t seed, int threads = 1);

struct lyapunov_estimate {
    double gamma_hat = 0.0;
    double rho2_hat = 0.0;
    double stderr_gamma = 0.0;
    double stderr_rho2 = 0.0;
    std::size_t trials = 0;
    std::size_t horizon = 0;
    bool degenerate_variance = false; // rho2_hat < 1e-12 (arithmetic measure)
};

lyapunov_estimate estimate_gamma_rho2(const measure_spec& mu, const proj_point& x0,
                                      std::size_t n, std::size_t trials, std::uint64_t seed,
                                      int threads = 1);
lyapunov_estimate estimate_from_ensemble(const walk_ensemble& ens);

/// Points x_{burnin+1}, ..., x_{burnin+samples} along one trajectory; their
/// empirical law approximates the stationary measure nu.
std::vector<proj_point> empirical_stationary(const measure_spec& mu, const proj_point& x0,
                                             std::size_t burnin, std::size_t samples,
                                             std::uint64_t seed);

struct regularity_fit_result {
    double eta_hat = 0.0;
    double c_hat = 0.0;
    double r2 = 0.0;
    bool degenerate = false; // empty radii after dropping zero-count balls
};

/// Least-squares slope of log nu_hat(B(H_y, r)) against log r.
regularity_fit_result regularity_fit(const std::vector<proj_point>& nu_samples,
                                     const dual_proj_point& y,
                                     const std::vector<double>& radii);

struct ldt_row {
    std::size_t n = 0;
    std::size_t hits = 0;
    std::size_t trials = 0;
    double p_hat = 0.0;
    double upper99 = 0.0; // one-sided Wilson bound, also meaningful at p_hat = 0
};

/// Fraction of trials with |sigma(S_n, x) - n gamma| >= n epsilon, per n.
std::vector<ldt_row> ldt_probe(const measure_spec& mu, const proj_point& x0, double gamma,
                               double epsilon, const std::vector<std::size_t>& n_list,
                               std::size_t trials, std::uint64_t seed, int threads = 1);

struct proximality_report {
    double log_sv_gap_mid = 0.0;  // log(s1/s2) of a product of length n/2
    double log_sv_gap_end = 0.0;  // log(s1/s2) at length n
    bool gap_grows = false;
};

/// Diagnostic only: proximality/strong irreducibility are not decidable from
/// samples. Warns when the top-two singular value gap fails to grow.
proximality_report proximality_diagnostic(const measure_spec& mu, std::size_t n,
                                          std::uint64_t seed);

} // namespace coclab
