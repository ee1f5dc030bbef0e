#pragma once

#include <string>
#include <utility>
#include <vector>

#include "prl/harness.hpp"

namespace prl {

/// Flat key=value configuration. Every key has a CLI flag of the same name;
/// unknown keys are rejected. '#' starts a comment.
void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Applies a file on top of `base` and returns the result.
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Canonical (key, value) listing in a fixed order; the config echo written
/// next to run artifacts round-trips through set_config_key.
std::vector<std::pair<std::string, std::string>> config_items(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

/// Named presets: "paper-analog" (grid 5x5, H_E=50, H_T=50,000, 150k steps),
/// "paper-ratio" (same ratio, 200k steps) and "door" (door K=16, 60k steps).
void apply_preset(RunConfig& cfg, const std::string& name);
std::vector<std::string> preset_names();

}  // namespace prl
