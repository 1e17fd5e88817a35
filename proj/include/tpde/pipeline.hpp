#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tpde/aem.hpp"
#include "tpde/compress.hpp"
#include "tpde/config.hpp"
#include "tpde/signal.hpp"

namespace tpde {

enum class Stage { build, compress, simulate, estimate };

struct CutoffStudy {
  double cutoff = 0.0;
  double gap = 0.0;
  std::vector<Index> max_bonds;  ///< largest chain bond per step
};

struct AemReport {
  std::vector<std::string> labels;
  MLTables tables;
  std::vector<AemWeights> weights;
  TimeSeries series;
  std::optional<GapEstimate> estimate;
  std::vector<std::pair<Index, double>> trace;
  std::vector<CutoffStudy> cutoff_study;
};

struct RunReport {
  RunConfig config;
  Stage reached = Stage::build;

  double e0 = 0.0;
  double e1 = 0.0;
  double gap_ref = 0.0;
  Index excited_multiplicity = 1;

  BrickWallCircuit prep;
  BrickWallCircuit evol;
  std::vector<SweepReport> prep_reports;
  std::vector<SweepReport> evol_reports;
  std::vector<double> enhance_overlaps;
  double prep_overlap = 1.0;
  double evol_fidelity = 1.0;
  double a0sq = 0.5;

  TimeSeries series;
  std::string run_log;  ///< JSON lines of every measurement
  /// Four m'(theta) values per step for each error-mitigation variant.
  std::vector<std::vector<std::array<double, 4>>> variant_measurements;
  std::optional<GapEstimate> estimate;
  std::vector<std::pair<Index, double>> trace;
  std::optional<AemReport> aem;

  double gap_error() const { return estimate ? estimate->gap - gap_ref : 0.0; }
};

/// Runs the stages up to and including `last`. Compressed circuits are reused
/// from the cache directory when one is configured. Progress goes to `log`.
RunReport run_pipeline(const RunConfig& cfg, Stage last = Stage::estimate,
                       std::ostream* log = nullptr);

/// Result files for the stages reached, written under cfg.output.
std::vector<std::string> write_results(const RunReport& report);

/// Columnar "x value" files for plotting, written under `dir`.
std::vector<std::string> emit_plotdata(const RunReport& report, const std::string& dir);

}  // namespace tpde
