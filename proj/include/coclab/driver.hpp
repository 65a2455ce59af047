#pragma once

#include <ostream>
#include <string>

#include "coclab/config.hpp"

namespace coclab {

inline constexpr int exit_ok = 0;
inline constexpr int exit_fail = 2;
inline constexpr int exit_inconclusive = 3;
inline constexpr int exit_config = 64;

struct run_options {
    std::string out_dir; // empty -> config's output_dir
    int threads = 1;
};

int cmd_estimate(const experiment_config& cfg, const run_options& opts, std::ostream& log);
int cmd_spectrum(const experiment_config& cfg, const run_options& opts, std::ostream& log);
int cmd_verify(const experiment_config& cfg, const std::string& which,
               const run_options& opts, std::ostream& log);

} // namespace coclab
