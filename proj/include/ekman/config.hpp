#pragma once

#include <filesystem>
#include <string_view>

#include "ekman/harness.hpp"

namespace ekman {

/// INI-style experiment file: `[section]` headers and `key = value` lines. The
/// `run.case` key selects the defaults that the other keys override; unknown
/// sections or keys are errors. Relative grid files resolve against `base_dir`.
ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::filesystem::path& base_dir,
                                         const std::filesystem::path& data_dir = EKMAN_DATA_DIR);

ExperimentConfig load_experiment_config(const std::filesystem::path& file,
                                        const std::filesystem::path& data_dir = EKMAN_DATA_DIR);

}  // namespace ekman
