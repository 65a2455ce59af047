#include "coclab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coclab/errors.hpp"

namespace coclab {

using nlohmann::json;

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <typename T>
T require(const json& j, const char* key) {
    if (!j.contains(key))
        throw config_error(std::string("config: missing required field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

template <typename T>
void optional_to(const json& j, const char* key, T& out) {
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

} // namespace

std::string experiment_config::hash_hex() const {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

experiment_config parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config: JSON parse error: ") + e.what());
    }

    experiment_config cfg;
    const json& measure = [&]() -> const json& {
        if (!j.contains("measure"))
            throw config_error("config: missing required field 'measure'");
        return j.at("measure");
    }();
    cfg.dimension = require<std::size_t>(measure, "dimension");
    if (!measure.contains("atoms") || !measure.at("atoms").is_array() ||
        measure.at("atoms").empty())
        throw config_error("config: measure.atoms must be a nonempty array");
    for (const auto& atom : measure.at("atoms")) {
        const auto rows = require<std::vector<std::vector<double>>>(atom, "matrix");
        const double weight = require<double>(atom, "weight");
        if (rows.size() != cfg.dimension)
            throw config_error("config: atom matrix row count != dimension");
        std::vector<double> flat;
        flat.reserve(cfg.dimension * cfg.dimension);
        for (const auto& row : rows) {
            if (row.size() != cfg.dimension)
                throw config_error("config: atom matrix column count != dimension");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        cfg.atom_entries.emplace_back(std::move(flat), weight);
    }

    if (!j.contains("seed"))
        throw config_error("config: missing required field 'seed' (mandatory for reproducibility)");
    cfg.seed = require<std::uint64_t>(j, "seed");

    optional_to(j, "x0", cfg.x0);
    optional_to(j, "n_list", cfg.n_list);
    optional_to(j, "trials", cfg.trials);
    optional_to(j, "grid_m", cfg.grid_m);
    optional_to(j, "output_dir", cfg.output_dir);
    optional_to(j, "emit_trials", cfg.emit_trials);
    optional_to(j, "burnin", cfg.burnin);
    optional_to(j, "stationary_samples", cfg.stationary_samples);
    optional_to(j, "radii", cfg.radii);
    optional_to(j, "ldt_epsilon", cfg.ldt_epsilon);
    optional_to(j, "tail_a_const", cfg.tail_a_const);
    optional_to(j, "s_values", cfg.s_values);
    optional_to(j, "fd_h", cfg.fd_h);
    optional_to(j, "xi_grid", cfg.xi_grid);
    optional_to(j, "delta_sweep", cfg.delta_sweep);
    optional_to(j, "scgf_n", cfg.scgf_n);

    if (j.contains("u")) {
        const json& u = j.at("u");
        const auto kind = require<std::string>(u, "kind");
        if (kind == "zero") {
            cfg.u = experiment_config::u_kind::zero;
        } else if (kind == "logdist") {
            cfg.u = experiment_config::u_kind::logdist;
            optional_to(u, "dual_point", cfg.u_dual);
        } else {
            throw config_error("config: u.kind must be 'zero' or 'logdist'");
        }
    }

    if (j.contains("targets")) {
        const json& t = j.at("targets");
        optional_to(t, "psi", cfg.psi_names);
        optional_to(t, "phi", cfg.phi_names);
        optional_to(t, "j_all", cfg.j_all);
        optional_to(t, "j_upto", cfg.j_upto);
        optional_to(t, "j_b", cfg.j_b);
    }

    // Referenced target names must resolve at parse time.
    static const std::vector<std::string> known_psi{"one", "gauss_bump", "clamped_linear",
                                                    "triangle"};
    static const std::vector<std::string> known_phi{"one", "cos2", "weierstrass"};
    for (const auto& name : cfg.psi_names)
        if (std::find(known_psi.begin(), known_psi.end(), name) == known_psi.end())
            throw config_error("config: unknown psi target '" + name + "'");
    for (const auto& name : cfg.phi_names)
        if (std::find(known_phi.begin(), known_phi.end(), name) == known_phi.end())
            throw config_error("config: unknown phi target '" + name + "'");

    cfg.canonical = j.dump(); // nlohmann objects iterate in sorted key order
    cfg.hash = fnv1a64(cfg.canonical);
    return cfg;
}

experiment_config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

measure_spec build_measure(const experiment_config& cfg) {
    std::vector<std::pair<group_element, double>> atoms;
    atoms.reserve(cfg.atom_entries.size());
    for (const auto& [flat, weight] : cfg.atom_entries)
        atoms.emplace_back(group_element(matrix(cfg.dimension, flat)), weight);
    return measure_spec(std::move(atoms));
}

proj_point build_x0(const experiment_config& cfg) {
    if (cfg.x0.empty())
        return proj_point::basis(cfg.dimension, 0);
    if (cfg.x0.size() != cfg.dimension)
        throw config_error("config: x0 dimension mismatch");
    return proj_point(cfg.x0);
}

dual_proj_point build_dual(const experiment_config& cfg) {
    if (cfg.u_dual.empty())
        return dual_proj_point::basis(cfg.dimension, cfg.dimension - 1);
    if (cfg.u_dual.size() != cfg.dimension)
        throw config_error("config: u.dual_point dimension mismatch");
    return dual_proj_point(cfg.u_dual);
}

admissible_fn build_u(const experiment_config& cfg, double eta_star) {
    if (cfg.u == experiment_config::u_kind::zero)
        return u_zero();
    return u_logdist(build_dual(cfg), eta_star);
}

std::vector<double> default_xi_grid() {
    // 10 points log-spaced in [0.02, 0.3].
    std::vector<double> grid;
    const double lo = std::log(0.02), hi = std::log(0.3);
    for (int i = 0; i < 10; ++i)
        grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / 9.0));
    return grid;
}

} // namespace coclab
