/**
 * @file config.hpp
 * @brief Flat key=value experiment configs: one [section] per module, no
 *        schema-by-convention magic. Ready-made presets live under configs/.
 *
 * Format by example:
 *
 *     # Comments run from '#' to end of line.
 *     [problem]
 *     preset = ltm        # stm | mtm | ltm, applied before any overrides
 *     tau_min = 1e-8
 *
 *     [sampler]
 *     kind = stretched    # uniform | random | stretched
 *     n_tau = 60
 *     n_y = 60
 *     p = 1.7             # stretch exponent (stretched only)
 *     seed = 7            # draw seed (random only)
 *
 *     [network]
 *     method = m1         # fills layers + trainer settings of Methods 1-8
 *     layers = 512, 256, 128, 64
 *     init_stddev = 0.1
 *
 *     [trainer]
 *     lr0 = 0.001
 *     beta1 = 0.99
 *     beta2 = 0.999
 *     eps = 1e-8
 *     steps = 20000
 *     decay_step = 2000   # 0 disables the staircase
 *     decay_rate = 0.85
 *     smooth_decay = false
 *     display_step = 1000
 *
 *     [run]
 *     mode = case1        # case1 | case2 boundary handling
 *     seed = 1
 *     name = my-run
 *
 * Shorthands (`problem.preset`, `network.method`) are applied first no
 * matter where they appear; explicit keys always override them. Unknown
 * sections or keys, duplicate keys, and malformed values are hard errors
 * naming the offending line and key.
 */

#pragma once

#include "fbnet/experiment.hpp"

#include <filesystem>
#include <string>

namespace fbnet {

/**
 * Parse config text. @p origin labels error messages (a file name, or a
 * placeholder like "<inline>" in tests).
 * @throws std::invalid_argument naming the offending key on any structural,
 *         type, or validation error.
 */
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin = "<inline>");

/// Read @p file and parse it. @throws std::invalid_argument (unreadable file
/// or any parse_experiment_config error).
ExperimentConfig load_experiment_config(const std::filesystem::path& file);

/// Render @p cfg in the exact format parse_experiment_config reads (all keys
/// explicit, no shorthands); parsing the result reproduces the same config.
std::string format_experiment_config(const ExperimentConfig& cfg);

}  // namespace fbnet
