#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coclab/ext_real.hpp"
#include "coclab/projgeom.hpp"
#include "coclab/randwalk.hpp"

namespace coclab {

/// Member of the admissible class L(eta_*, alpha_*, A_*): a target function
/// on P^{d-1} with exponential nu-tails and a weighted Holder modulus.
struct admissible_fn {
    std::function<ext_real(const proj_point&)> eval;
    double eta_star = 1.0;
    double alpha_star = 1.0;
    double a_star = 1.0;
    std::string name = "custom";
    /// Singular set: empty, or the hyperplane H_y of a dual point.
    std::optional<dual_proj_point> singular_hyperplane;

    ext_real operator()(const proj_point& x) const { return eval(x); }
};

/// u = 0; admissible for any A_* >= 1.
admissible_fn u_zero();

/// u(x) = log d(x, H_y); alpha_* = 1, singular set H_y. eta_star is an input
/// because the tail exponent comes from a regularity fit of nu, not from the
/// function itself.
admissible_fn u_logdist(const dual_proj_point& y, double eta_star = 0.5, double a_star = 4.0);

/// Base bump chi~ of the partition of unity: supported by (-1, 1), equal to 1
/// on a plateau around 0, chi~(t) + chi~(t-1) = 1 on [0, 1], C^1 norm <= 4.
double chi_tilde(double t);
double chi_tilde_derivative(double t);

/// chi_k(w) = chi~(u(w) + k), supported by the level set {|u + k| < 1}.
class partition_bump {
  public:
    partition_bump(admissible_fn u, int k) : u_(std::move(u)), k_(k) {}

    int k() const { return k_; }
    const admissible_fn& underlying() const { return u_; }

    double operator()(const proj_point& w) const {
        const ext_real uw = u_(w);
        if (!uw.finite())
            return 0.0;
        return chi_tilde(uw.value() + static_cast<double>(k_));
    }

  private:
    admissible_fn u_;
    int k_;
};

partition_bump partition(const admissible_fn& u, int k);

/// Sum of all bumps at w; equals 1 off the singular set (only the finitely
/// many k with |u(w)+k| < 1 contribute).
double partition_sum(const admissible_fn& u, const proj_point& w);

struct property1_row {
    double t = 0.0;
    double tail_hat = 0.0;
    double bound = 0.0;
    double slack = 0.0; // binomial 99% fluctuation allowance
    bool pass = false;
};

struct property1_report {
    std::vector<property1_row> rows;
    bool all_pass = true;
};

/// Empirical check of nu{|u| >= t} <= A_* exp(-eta_* t) on a t-grid.
property1_report check_property1(const admissible_fn& u,
                                 const std::vector<proj_point>& nu_samples,
                                 const std::vector<double>& t_grid);

struct property2_report {
    double max_ratio = 0.0;
    bool pass = false;
    std::size_t pairs_checked = 0;
};

/// Sampled check of the weighted Holder modulus
/// |u(x)-u(x')| <= A_* d(x,x')^{alpha_*} (e^{alpha_*|u(x)|} + e^{alpha_*|u(x')|}).
property2_report check_property2(const admissible_fn& u,
                                 const std::vector<std::pair<proj_point, proj_point>>& pairs);

/// Max over pairs of |chi_k(x)-chi_k(x')| / (d(x,x')^alpha e^{alpha |k|}).
double partition_holder_check(const admissible_fn& u, int k, double alpha,
                              const std::vector<std::pair<proj_point, proj_point>>& pairs);

struct tail_ldt_row {
    std::size_t n = 0;
    std::size_t hits = 0;
    std::size_t trials = 0;
    double p_hat = 0.0;
    double n_times_p = 0.0;
    double upper99 = 0.0;
};

/// p_hat(n) = fraction of trials with |u(S_n x)| >= a_const log n; renders
/// the mu^{*n}{|u(g x)| >= A log n} <= C/n tail bound as a table.
std::vector<tail_ldt_row> tail_ldt_probe(const measure_spec& mu, const admissible_fn& u,
                                         const proj_point& x0,
                                         const std::vector<std::size_t>& n_list,
                                         std::size_t trials, double a_const,
                                         std::uint64_t seed, int threads = 1);

} // namespace coclab
