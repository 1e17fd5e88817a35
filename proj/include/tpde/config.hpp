#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tpde/tensor.hpp"

namespace tpde {

/// Flat run configuration. Text form: one "key = value" per line, '#' starts
/// a comment, lists are comma separated.
struct RunConfig {
  Index n_sites = 4;
  double hopping = 1.0;
  double onsite = 10.0;
  double dt = 0.05;
  Index max_steps = 50;

  std::string prep_mode = "compressed";  ///< compressed | exact
  Index prep_depth = 5;
  Index prep_sweeps = 1000;
  Index evol_depth = 5;
  Index evol_sweeps = 10000;
  Index slices = 100;
  double perturbation = 0.01;
  double cutoff = 1e-12;

  Index shots = 100000;  ///< 0 selects exact probabilities
  double p_step = 0.0;
  double stop_threshold = -1.0;  ///< negative: 4/sqrt(shots), or off in exact mode
  Index stop_window = 3;

  bool aem = false;
  std::string aem_kind = "sweeps";  ///< sweeps | slices
  std::vector<Index> aem_sweeps{1, 10, 10000};
  std::vector<Index> aem_slices{1, 4, 100};
  double aem_cutoff = 1e-12;
  /// Extra M/L contractions at these cutoffs (gap and bond study).
  std::vector<double> aem_study_cutoffs;

  bool enhance = false;
  Index enhance_depth = 5;
  Index enhance_sweeps = 1000;
  Index enhance_iters = 2;

  std::uint64_t seed = 1;
  std::string backend = "auto";  ///< auto | dense | mps
  std::string output = "tpde_out";
  std::string cache_dir = ".tpde_cache";  ///< empty disables caching

  /// Throws ValidationError naming every offending key.
  void validate() const;
  /// Effective early-stop threshold.
  double effective_stop_threshold() const;
};

/// Keys in canonical order.
const std::vector<std::string>& config_keys();

/// Sets one key; throws ValidationError for unknown keys or malformed values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& cfg, const std::string& key);

RunConfig parse_config(std::istream& is, RunConfig base = {});
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
/// Every key in canonical order.
std::string serialize_config(const RunConfig& cfg);

/// Named reproduction presets; each entry is (subdirectory, config).
std::vector<std::pair<std::string, RunConfig>> preset(const std::string& name);
std::vector<std::string> preset_names();

/// Stable 64-bit FNV-1a hash, used for cache keys.
std::uint64_t fnv1a(const std::string& text);

}  // namespace tpde
