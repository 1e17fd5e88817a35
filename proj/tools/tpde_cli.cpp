// Command-line driver: build, compress, simulate, estimate, run, report.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tpde/errors.hpp"
#include "tpde/pipeline.hpp"

extern "C" void openblas_set_num_threads(int);

namespace fs = std::filesystem;
using namespace tpde;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitResource = 3;

struct Common {
  std::string config_file;
  std::string preset_name;
  std::string output;
  std::vector<std::string> overrides;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_file, "key = value configuration file");
  cmd->add_option("-p,--preset", c.preset_name, "reproduction preset");
  cmd->add_option("-o,--output", c.output, "output directory");
  cmd->add_option("overrides", c.overrides, "key=value overrides of configuration keys");
  cmd->add_flag("-q,--quiet", c.quiet, "no progress output");
}

std::vector<std::pair<std::string, RunConfig>> resolve(const Common& c) {
  std::vector<std::pair<std::string, RunConfig>> runs;
  if (!c.preset_name.empty()) {
    runs = preset(c.preset_name);
  } else {
    runs.emplace_back("", RunConfig{});
  }
  for (auto& [sub, cfg] : runs) {
    if (!c.config_file.empty()) cfg = load_config(c.config_file, cfg);
    for (const auto& kv : c.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError("override must be key=value: " + kv);
      set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!c.output.empty()) cfg.output = c.output;
    if (!sub.empty()) cfg.output = (fs::path(cfg.output) / sub).string();
    cfg.validate();
  }
  return runs;
}

void print_summary(const RunReport& r) {
  std::cout << std::setprecision(10) << "output " << r.config.output << "\n  E0 " << r.e0 << "  E1 " << r.e1
            << "  gap_ref " << r.gap_ref << "\n";
  if (r.reached >= Stage::compress && r.config.prep_mode == "compressed") {
    std::cout << "  prep_overlap " << r.prep_overlap << "  evol_fidelity " << r.evol_fidelity << "  a0sq "
              << r.a0sq << "\n";
  }
  if (r.reached >= Stage::simulate) {
    std::cout << "  samples " << r.series.samples.size() << " (" << r.series.stop_reason << ")\n";
  }
  if (r.estimate) {
    std::cout << "  gap " << r.estimate->gap << "  error " << r.gap_error() << "  relative "
              << std::abs(r.gap_error()) / r.gap_ref << "\n";
  }
  if (r.aem && r.aem->estimate) {
    std::cout << "  gap_aem " << r.aem->estimate->gap << "  error " << r.aem->estimate->gap - r.gap_ref << "\n";
    for (const auto& c : r.aem->cutoff_study) std::cout << "  cutoff " << c.cutoff << "  gap " << c.gap << "\n";
  }
}

int run_stage(const Common& c, Stage stage, bool plots) {
  const auto runs = resolve(c);
  std::vector<std::pair<std::string, RunReport>> done;
  for (const auto& [sub, cfg] : runs) {
    RunReport r = run_pipeline(cfg, stage, c.quiet ? nullptr : &std::cerr);
    write_results(r);
    if (plots) emit_plotdata(r, (fs::path(cfg.output) / "plots").string());
    print_summary(r);
    done.emplace_back(sub, std::move(r));
  }
  // Side-by-side copies for multi-run presets.
  if (plots && done.size() > 1) {
    const fs::path top = fs::path(done.front().second.config.output).parent_path() / "plots";
    fs::create_directories(top);
    for (const auto& [sub, r] : done) {
      const fs::path src = fs::path(r.config.output) / "plots" / "gap_error.txt";
      if (fs::exists(src)) fs::copy_file(src, top / ("gap_error_" + sub + ".txt"), fs::copy_options::overwrite_existing);
    }
  }
  return 0;
}

int estimate_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read series file " + path);
  const TimeSeries ts = read_series(is);
  const GapEstimate g = estimate_gap(ts);
  std::cout << std::setprecision(12) << "gap " << g.gap << "\ngap_dominant_only " << g.gap_dominant_only << "\n";
  write_estimate(std::cout, g.estimate);
  return 0;
}

int report_dir(const std::string& dir) {
  std::ifstream is(fs::path(dir) / "report.json");
  if (!is) throw ValidationError("no report.json in " + dir);
  const auto j = nlohmann::json::parse(is);
  for (const auto& [k, v] : j.items()) std::cout << k << " " << v.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* t = std::getenv("TPDE_THREADS")) {
    const int n = std::atoi(t);
    if (n > 0) openblas_set_num_threads(n);
  }
  CLI::App app{"Tensor-network phase-difference estimation pipeline"};
  app.require_subcommand(1);
  Common common;
  std::string series_file, report_path;
  struct Verb {
    const char* name;
    const char* help;
    Stage stage;
  };
  const Verb verbs[] = {{"build", "model, reference gap and targets", Stage::build},
                        {"compress", "compress preparation and evolution circuits", Stage::compress},
                        {"simulate", "collect the time series", Stage::simulate},
                        {"estimate", "estimate the gap (or --series FILE)", Stage::estimate},
                        {"run", "full pipeline with plot data", Stage::estimate}};
  std::vector<CLI::App*> cmds;
  for (const auto& v : verbs) {
    CLI::App* cmd = app.add_subcommand(v.name, v.help);
    add_common(cmd, common);
    cmds.push_back(cmd);
  }
  cmds[3]->add_option("--series", series_file, "estimate from an existing series file");
  CLI::App* report = app.add_subcommand("report", "print the summary of an output directory");
  report->add_option("dir", report_path, "output directory")->required();
  app.add_subcommand("presets", "list presets")->callback([] {
    for (const auto& n : preset_names()) std::cout << n << "\n";
  });
  app.add_subcommand("keys", "list configuration keys with defaults")->callback([] {
    std::cout << serialize_config(RunConfig{});
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  try {
    if (report->parsed()) return report_dir(report_path);
    for (std::size_t i = 0; i < cmds.size(); ++i) {
      if (!cmds[i]->parsed()) continue;
      if (i == 3 && !series_file.empty()) return estimate_file(series_file);
      return run_stage(common, verbs[i].stage, i == 4);
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
