#include "tpde/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "tpde/errors.hpp"

namespace tpde {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ValidationError("invalid value for " + key + ": '" + value + "'");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v);
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    // Accept integral values written in floating-point form such as 1e4.
    const double d = to_double(key, v);
    if (d < 0.0 || d != std::floor(d) || d > 1e18) bad_value(key, v);
    return static_cast<std::uint64_t>(d);
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad_value(key, v);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt(xs[i]);
  return out;
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Entry index_entry(const std::string& key, Index RunConfig::*field) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*field = to_u64(key, v); },
          [=](const RunConfig& c) { return std::to_string(c.*field); }};
}
Entry double_entry(const std::string& key, double RunConfig::*field) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*field = to_double(key, v); },
          [=](const RunConfig& c) { return format_double(c.*field); }};
}
Entry bool_entry(const std::string& key, bool RunConfig::*field) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*field = to_bool(key, v); },
          [=](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}
Entry string_entry(const std::string& key, std::string RunConfig::*field) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*field = v; },
          [=](const RunConfig& c) { return c.*field; }};
}
Entry index_list_entry(const std::string& key, std::vector<Index> RunConfig::*field) {
  return {key,
          [=](RunConfig& c, const std::string& v) {
            std::vector<Index> xs;
            for (const auto& item : split_list(v)) xs.push_back(to_u64(key, item));
            c.*field = xs;
          },
          [=](const RunConfig& c) {
            return join(c.*field, [](Index x) { return std::to_string(x); });
          }};
}
Entry double_list_entry(const std::string& key, std::vector<double> RunConfig::*field) {
  return {key,
          [=](RunConfig& c, const std::string& v) {
            std::vector<double> xs;
            for (const auto& item : split_list(v)) xs.push_back(to_double(key, item));
            c.*field = xs;
          },
          [=](const RunConfig& c) { return join(c.*field, format_double); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      index_entry("model.n_sites", &RunConfig::n_sites),
      double_entry("model.hopping", &RunConfig::hopping),
      double_entry("model.onsite", &RunConfig::onsite),
      double_entry("dt", &RunConfig::dt),
      index_entry("max_steps", &RunConfig::max_steps),
      string_entry("prep.mode", &RunConfig::prep_mode),
      index_entry("prep.depth", &RunConfig::prep_depth),
      index_entry("prep.sweeps", &RunConfig::prep_sweeps),
      index_entry("evol.depth", &RunConfig::evol_depth),
      index_entry("evol.sweeps", &RunConfig::evol_sweeps),
      index_entry("evol.slices", &RunConfig::slices),
      double_entry("init.perturbation", &RunConfig::perturbation),
      double_entry("cutoff", &RunConfig::cutoff),
      index_entry("shots", &RunConfig::shots),
      double_entry("noise.p_step", &RunConfig::p_step),
      double_entry("stop.threshold", &RunConfig::stop_threshold),
      index_entry("stop.window", &RunConfig::stop_window),
      bool_entry("aem.enabled", &RunConfig::aem),
      string_entry("aem.kind", &RunConfig::aem_kind),
      index_list_entry("aem.sweeps", &RunConfig::aem_sweeps),
      index_list_entry("aem.slices", &RunConfig::aem_slices),
      double_entry("aem.cutoff", &RunConfig::aem_cutoff),
      double_list_entry("aem.study_cutoffs", &RunConfig::aem_study_cutoffs),
      bool_entry("enhance.enabled", &RunConfig::enhance),
      index_entry("enhance.depth", &RunConfig::enhance_depth),
      index_entry("enhance.sweeps", &RunConfig::enhance_sweeps),
      index_entry("enhance.max_iters", &RunConfig::enhance_iters),
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      string_entry("sim.backend", &RunConfig::backend),
      string_entry("output", &RunConfig::output),
      string_entry("cache.dir", &RunConfig::cache_dir),
  };
  return table;
}

const Entry& find_entry(const std::string& key) {
  for (const auto& e : entries())
    if (e.key == key) return e;
  throw ValidationError("unknown configuration key: " + key);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  find_entry(key).set(cfg, trim(value));
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  return find_entry(key).get(cfg);
}

RunConfig parse_config(std::istream& is, RunConfig base) {
  std::string line;
  Index number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("line " + std::to_string(number) + ": expected key = value");
    }
    set_config_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream is(text);
  return parse_config(is, std::move(base));
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read configuration file " + path);
  return parse_config(is, std::move(base));
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& e : entries()) out += e.key + " = " + e.get(cfg) + "\n";
  return out;
}

double RunConfig::effective_stop_threshold() const {
  if (stop_threshold >= 0.0) return stop_threshold;
  return shots == 0 ? 0.0 : 4.0 / std::sqrt(static_cast<double>(shots));
}

void RunConfig::validate() const {
  std::vector<std::string> bad;
  auto require = [&](bool ok, const char* key) {
    if (!ok) bad.emplace_back(key);
  };
  require(n_sites >= 1 && n_sites <= 6, "model.n_sites");
  require(std::isfinite(hopping), "model.hopping");
  require(std::isfinite(onsite), "model.onsite");
  require(dt > 0.0, "dt");
  require(max_steps >= 2, "max_steps");
  require(prep_mode == "compressed" || prep_mode == "exact", "prep.mode");
  require(prep_depth >= 1, "prep.depth");
  require(prep_sweeps >= 1, "prep.sweeps");
  require(evol_depth >= 1, "evol.depth");
  require(evol_sweeps >= 1, "evol.sweeps");
  require(slices >= 1, "evol.slices");
  require(perturbation >= 0.0, "init.perturbation");
  require(cutoff >= 0.0 && cutoff < 1.0, "cutoff");
  require(p_step >= 0.0 && p_step < 1.0, "noise.p_step");
  require(stop_window >= 1, "stop.window");
  require(aem_kind == "sweeps" || aem_kind == "slices", "aem.kind");
  if (aem) {
    require(prep_mode == "compressed", "aem.enabled");
    if (aem_kind == "sweeps") {
      require(aem_sweeps.size() >= 2 &&
                  *std::max_element(aem_sweeps.begin(), aem_sweeps.end()) <= evol_sweeps &&
                  *std::min_element(aem_sweeps.begin(), aem_sweeps.end()) >= 1,
              "aem.sweeps");
    } else {
      require(aem_slices.size() >= 2 &&
                  *std::min_element(aem_slices.begin(), aem_slices.end()) >= 1,
              "aem.slices");
    }
  }
  require(aem_cutoff >= 0.0 && aem_cutoff < 1.0, "aem.cutoff");
  require(std::all_of(aem_study_cutoffs.begin(), aem_study_cutoffs.end(),
                      [](double c) { return c >= 0.0 && c < 1.0; }),
          "aem.study_cutoffs");
  require(enhance_depth >= 1, "enhance.depth");
  require(enhance_sweeps >= 1, "enhance.sweeps");
  require(enhance_iters >= 1, "enhance.max_iters");
  require(backend == "auto" || backend == "dense" || backend == "mps", "sim.backend");
  require(!output.empty(), "output");
  if (!bad.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& k : bad) msg += " " + k;
    throw ValidationError(msg);
  }
}

std::vector<std::string> preset_names() {
  return {"exact_smoke", "fig_dt_study", "fig_aem_sweeps", "fig_aem_slices", "fig_aem_cutoffs",
          "fig_overlap"};
}

std::vector<std::pair<std::string, RunConfig>> preset(const std::string& name) {
  RunConfig base;
  base.shots = 0;
  if (name == "exact_smoke") {
    base.prep_mode = "exact";
    return {{"exact_smoke", base}};
  }
  if (name == "fig_dt_study") {
    std::vector<std::pair<std::string, RunConfig>> out;
    for (double dt : {0.5, 0.1, 0.05}) {
      RunConfig c = base;
      c.dt = dt;
      out.emplace_back("dt_" + format_double(dt), c);
    }
    return out;
  }
  if (name == "fig_aem_sweeps") {
    base.dt = 0.1;
    base.aem = true;
    return {{"aem_sweeps", base}};
  }
  if (name == "fig_aem_slices") {
    base.dt = 0.1;
    base.aem = true;
    base.aem_kind = "slices";
    return {{"aem_slices", base}};
  }
  if (name == "fig_aem_cutoffs") {
    base.aem = true;
    base.aem_study_cutoffs = {1e-12, 1e-10, 1e-8};
    return {{"aem_cutoffs", base}};
  }
  if (name == "fig_overlap") {
    base.enhance = true;
    return {{"overlap", base}};
  }
  throw ValidationError("unknown preset: " + name);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace tpde
