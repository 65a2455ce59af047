#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "coclab/admissible.hpp"
#include "coclab/randwalk.hpp"

namespace coclab {

/// One experiment per JSON file; the seed is mandatory so every artifact is
/// reproducible from its config alone.
struct experiment_config {
    std::size_t dimension = 2;
    std::vector<std::pair<std::vector<double>, double>> atom_entries; // row-major, weight
    std::vector<double> x0; // empty -> e1

    enum class u_kind { zero, logdist };
    u_kind u = u_kind::zero;
    std::vector<double> u_dual; // dual point for logdist; empty -> e_d^*

    std::vector<std::string> psi_names{"one", "gauss_bump", "clamped_linear"};
    std::vector<std::string> phi_names{"one", "cos2", "weierstrass"};
    bool j_all = true;   // include J = R in the target matrix
    bool j_upto = true;  // include J = (-inf, j_b]
    double j_b = 0.0;

    std::vector<std::size_t> n_list{64, 4096};
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    std::size_t grid_m = 1024;
    std::string output_dir = "out";
    bool emit_trials = false; // per-trial walk records to trials.csv

    // Estimation / probe knobs (defaults sized for desk scale).
    std::size_t burnin = 2000;
    std::size_t stationary_samples = 100000;
    std::vector<double> radii{0.5, 0.25, 0.1, 0.05, 0.02, 0.01, 0.005};
    double ldt_epsilon = 0.2;
    double tail_a_const = 4.0;
    std::vector<double> s_values{-0.2, -0.1, 0.1, 0.2};
    double fd_h = 0.02;
    std::vector<double> xi_grid; // empty -> log-spaced in [0.02, 0.3]
    std::vector<double> delta_sweep{0.5, 0.2, 0.1};
    std::size_t scgf_n = 200;

    std::string canonical; // sorted-key JSON dump
    std::uint64_t hash = 0;

    std::string hash_hex() const;
};

experiment_config load_config(const std::filesystem::path& path);
experiment_config parse_config_text(const std::string& text);

measure_spec build_measure(const experiment_config& cfg);
proj_point build_x0(const experiment_config& cfg);
dual_proj_point build_dual(const experiment_config& cfg);
admissible_fn build_u(const experiment_config& cfg, double eta_star = 0.5);

std::vector<double> default_xi_grid();

} // namespace coclab
