#include "tpde/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "tpde/errors.hpp"
#include "tpde/hubbard.hpp"
#include "tpde/sim.hpp"
#include "tpde/trotter.hpp"

namespace tpde {

namespace fs = std::filesystem;

namespace {

class Progress {
 public:
  explicit Progress(std::ostream* os) : os_(os), start_(std::chrono::steady_clock::now()) {}
  void operator()(const std::string& msg) const {
    if (!os_) return;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    *os_ << "[" << std::fixed << std::setprecision(1) << s << "s] " << msg << std::endl;
  }

 private:
  std::ostream* os_;
  std::chrono::steady_clock::time_point start_;
};

// Cache file: header, key, reports, checkpoints, final circuit.
void write_cache(const std::string& path, const std::string& key, const CompressResult& r) {
  std::ofstream os(path + ".tmp");
  os << std::setprecision(17);
  os << "tpde-cache 1\n" << key << "\n" << r.reports.size() << "\n";
  for (const auto& rep : r.reports) os << rep.sweep << ' ' << rep.objective << ' ' << rep.overlap_or_fidelity << '\n';
  os << r.checkpoints.size() << "\n";
  for (const auto& [sweep, c] : r.checkpoints) {
    os << sweep << "\n";
    write_circuit(os, c);
  }
  write_circuit(os, r.circuit);
  os.close();
  fs::rename(path + ".tmp", path);
}

std::optional<CompressResult> read_cache(const std::string& path, const std::string& key) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  std::string header, stored;
  std::getline(is, header);
  std::getline(is, stored);
  if (header != "tpde-cache 1" || stored != key) return std::nullopt;
  CompressResult r;
  Index n = 0;
  is >> n;
  r.reports.resize(n);
  for (auto& rep : r.reports) is >> rep.sweep >> rep.objective >> rep.overlap_or_fidelity;
  is >> n;
  for (Index k = 0; k < n; ++k) {
    Index sweep = 0;
    is >> sweep;
    is.ignore();
    r.checkpoints.emplace_back(sweep, read_circuit(is));
  }
  is.ignore();
  r.circuit = read_circuit(is);
  if (!is) return std::nullopt;
  return r;
}

template <class F>
CompressResult cached(const RunConfig& cfg, const std::string& key, const Progress& progress, F&& make) {
  std::string path;
  if (!cfg.cache_dir.empty()) {
    fs::create_directories(cfg.cache_dir);
    std::ostringstream name;
    name << std::hex << std::setw(16) << std::setfill('0') << fnv1a(key) << ".circ";
    path = (fs::path(cfg.cache_dir) / name.str()).string();
    if (auto hit = read_cache(path, key)) {
      progress("cache hit: " + key);
      return *hit;
    }
  }
  CompressResult r = make();
  if (!path.empty()) write_cache(path, key, r);
  return r;
}

std::string model_key(const RunConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17) << "n_sites=" << c.n_sites << " T=" << c.hopping << " U=" << c.onsite
     << " dt=" << c.dt << " cutoff=" << c.cutoff << " eps=" << c.perturbation << " seed=" << c.seed;
  return os.str();
}

std::string join_indices(const std::vector<Index>& xs) {
  std::string s;
  for (Index x : xs) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

CompressResult compress_evolution(const RunConfig& cfg, const Hamiltonian& h, Index slices,
                                  const std::vector<Index>& checkpoints, const Progress& progress) {
  const std::string key = "evol " + model_key(cfg) + " depth=" + std::to_string(cfg.evol_depth) +
                          " sweeps=" + std::to_string(cfg.evol_sweeps) + " slices=" +
                          std::to_string(slices) + " checkpoints=" + join_indices(checkpoints);
  return cached(cfg, key, progress, [&] {
    progress("compressing evolution (m=" + std::to_string(slices) + ", " +
             std::to_string(cfg.evol_sweeps) + " sweeps)");
    TrotterSpec spec;
    spec.dt = cfg.dt;
    spec.slices = slices;
    spec.sign = TimeSign::reverse;
    spec.cutoff = cfg.cutoff;
    const Mpo ref = build_trotter_mpo(h, spec);
    CompressOptions opt;
    opt.sweeps = cfg.evol_sweeps;
    opt.perturbation = cfg.perturbation;
    opt.seed = cfg.seed + 1;
    opt.checkpoints = checkpoints;
    return optimize_evolution(ref, cfg.evol_depth, opt);
  });
}

CompressResult compress_prep(const RunConfig& cfg, const Mps& target, const Progress& progress,
                             std::vector<double>& enhance_overlaps) {
  std::string key = "prep " + model_key(cfg);
  if (cfg.enhance) {
    key += " enhance depth=" + std::to_string(cfg.enhance_depth) + " sweeps=" +
           std::to_string(cfg.enhance_sweeps) + " iters=" + std::to_string(cfg.enhance_iters);
  } else {
    key += " depth=" + std::to_string(cfg.prep_depth) + " sweeps=" + std::to_string(cfg.prep_sweeps);
  }
  CompressResult r = cached(cfg, key, progress, [&] {
    CompressOptions opt;
    opt.perturbation = cfg.perturbation;
    opt.seed = cfg.seed;
    if (!cfg.enhance) {
      progress("compressing preparation (" + std::to_string(cfg.prep_sweeps) + " sweeps)");
      opt.sweeps = cfg.prep_sweeps;
      return optimize_prep(target, cfg.prep_depth, opt);
    }
    progress("overlap enhancement (" + std::to_string(cfg.enhance_iters) + " iterations)");
    opt.sweeps = cfg.enhance_sweeps;
    const EnhanceResult e = enhance_overlap(target, cfg.enhance_depth, opt, cfg.enhance_iters, cfg.cutoff);
    CompressResult out;
    out.circuit = e.circuit;
    for (Index k = 0; k < e.overlaps.size(); ++k) out.reports.push_back({k + 1, 1.0 - e.overlaps[k], e.overlaps[k]});
    return out;
  });
  if (cfg.enhance) {
    for (const auto& rep : r.reports) enhance_overlaps.push_back(rep.overlap_or_fidelity);
  }
  return r;
}

SimBackend backend_of(const std::string& name) {
  if (name == "dense") return SimBackend::dense;
  if (name == "mps") return SimBackend::mps;
  return SimBackend::automatic;
}

std::optional<GapEstimate> try_estimate(const TimeSeries& ts) {
  try {
    return estimate_gap(ts);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

RunReport run_pipeline(const RunConfig& cfg, Stage last, std::ostream* log) {
  cfg.validate();
  const Progress progress(log);
  RunReport rep;
  rep.config = cfg;
  const bool exact = cfg.prep_mode == "exact";
  if (!exact && last >= Stage::compress && 2 * cfg.n_sites > kMaxDenseEvolutionQubits) {
    throw ResourceError("compressed mode needs " + std::to_string(2 * cfg.n_sites) + " qubits, limit is " +
                        std::to_string(kMaxDenseEvolutionQubits));
  }

  // build
  const Hamiltonian h = build_hubbard({cfg.n_sites, cfg.hopping, cfg.onsite});
  const TargetPair targets = select_targets(h);
  rep.e0 = targets.e0;
  rep.e1 = targets.e1;
  rep.gap_ref = targets.gap;
  rep.excited_multiplicity = targets.excited_multiplicity;
  progress("model built: E0=" + std::to_string(rep.e0) + " gap=" + std::to_string(rep.gap_ref));
  rep.reached = Stage::build;
  if (last == Stage::build) return rep;

  // compress
  const Index n = h.qubits;
  CompressResult evol_run;
  std::vector<CompressResult> slice_runs;
  if (!exact) {
    std::vector<Index> checkpoints;
    if (cfg.aem && cfg.aem_kind == "sweeps") checkpoints = cfg.aem_sweeps;
    evol_run = compress_evolution(cfg, h, cfg.slices, checkpoints, progress);
    rep.evol = evol_run.circuit;
    rep.evol_reports = evol_run.reports;
    rep.evol_fidelity = evol_run.reports.back().overlap_or_fidelity;
    if (cfg.aem && cfg.aem_kind == "slices") {
      for (Index m : cfg.aem_slices) slice_runs.push_back(compress_evolution(cfg, h, m, {}, progress));
    }
    const Mps target = superpose_ancilla(statevector_to_mps(targets.ground), statevector_to_mps(targets.excited),
                                         kUnboundedBond, cfg.cutoff);
    const CompressResult prep_run = compress_prep(cfg, target, progress, rep.enhance_overlaps);
    rep.prep = prep_run.circuit;
    rep.prep_reports = prep_run.reports;
    rep.prep_overlap = std::abs(prep_overlap(target, rep.prep));
    rep.a0sq = ancilla_zero_weight(rep.prep);
    progress("fidelity=" + std::to_string(rep.evol_fidelity) + " overlap=" + std::to_string(rep.prep_overlap) +
             " a0sq=" + std::to_string(rep.a0sq));
  }
  rep.reached = Stage::compress;
  if (last == Stage::compress) return rep;

  // simulate
  NoiseSpec noise;
  noise.p_step = cfg.p_step;
  noise.shots = cfg.shots;
  noise.seed = cfg.seed;
  std::ostringstream run_log;
  auto measure_with = [&](StepSimulator& sim, const NoiseSpec& ns, bool logged) {
    return [&sim, ns, logged, &run_log, &cfg](Index step) {
      while (sim.steps() < step) sim.advance();
      const auto m = sim.probabilities();
      std::array<double, 4> out{};
      for (Index k = 0; k < 4; ++k) {
        const Observation o = observe(m[k], step, k, sim.wires(), ns);
        out[k] = o.m;
        if (logged) write_run_log_line(run_log, static_cast<double>(step) * cfg.dt, kPhaseAngles[k], ns.shots, o.count, o.m);
      }
      return out;
    };
  };
  std::optional<StepSimulator> sim;
  if (exact) {
    CVector psi0(Eigen::Index{2} << n);
    psi0 << targets.ground, targets.excited;
    psi0 /= std::sqrt(2.0);
    sim.emplace(psi0, trotter_dense(h, cfg.dt, cfg.slices, TimeSign::forward));
    rep.a0sq = 0.5;
  } else {
    sim.emplace(rep.prep, rep.evol, backend_of(cfg.backend));
  }
  progress("simulating up to " + std::to_string(cfg.max_steps) + " steps");
  rep.series = collect_series(measure_with(*sim, noise, true), rep.a0sq, cfg.dt, cfg.max_steps,
                              cfg.effective_stop_threshold(), cfg.stop_window);
  rep.series.shots = cfg.shots;
  rep.series.p_step = cfg.p_step;
  rep.run_log = run_log.str();

  VariantSet variants;
  if (cfg.aem) {
    if (cfg.aem_kind == "sweeps") {
      variants = sweep_variants(evol_run, cfg.aem_sweeps);
    } else {
      variants.kind = VariantKind::slices;
      for (Index i = 0; i < cfg.aem_slices.size(); ++i) {
        variants.variants.push_back({"slices=" + std::to_string(cfg.aem_slices[i]), slice_runs[i].circuit,
                                     static_cast<double>(cfg.aem_slices[i])});
      }
    }
    const Index steps = rep.series.samples.size();
    for (Index i = 0; i < variants.variants.size(); ++i) {
      StepSimulator vs(rep.prep, variants.variants[i].evol, backend_of(cfg.backend));
      NoiseSpec vn = noise;
      vn.seed = cfg.seed + 1000003 * (i + 1);
      auto measure = measure_with(vs, vn, false);
      std::vector<std::array<double, 4>> rows;
      for (Index step = 1; step <= steps; ++step) rows.push_back(measure(step));
      rep.variant_measurements.push_back(std::move(rows));
    }
  }
  rep.reached = Stage::simulate;
  if (last == Stage::simulate) return rep;

  // estimate
  rep.estimate = try_estimate(rep.series);
  rep.trace = gap_trace(rep.series);
  if (rep.estimate) progress("gap estimate " + std::to_string(rep.estimate->gap));

  if (cfg.aem) {
    AemReport a;
    for (const auto& v : variants.variants) a.labels.push_back(v.label);
    const Mps prep_mps = circuit_to_mps(rep.prep, zero_state(n + 1), kUnboundedBond, cfg.cutoff);
    const Mpo exact_forward = build_exact_reference_mpo(h, cfg.dt, TimeSign::reverse, cfg.cutoff);
    const Index steps = rep.series.samples.size();
    auto mitigate = [&](double cutoff, MLTables& tables, std::vector<AemWeights>& weights) {
      SandwichOptions so;
      so.cutoff = cutoff;
      tables = compute_M_L(prep_mps, variants, exact_forward, steps, so);
      weights.clear();
      for (Index k = 0; k < tables.completed_steps; ++k) weights.push_back(solve_weights(tables.m[k], tables.l[k]));
      TimeSeries ts = mitigated_series(weights, rep.variant_measurements, rep.a0sq, cfg.dt);
      ts.shots = cfg.shots;
      ts.p_step = cfg.p_step;
      return ts;
    };
    progress("error mitigation tables (cutoff " + std::to_string(cfg.aem_cutoff) + ")");
    a.series = mitigate(cfg.aem_cutoff, a.tables, a.weights);
    a.estimate = try_estimate(a.series);
    a.trace = gap_trace(a.series);
    if (a.estimate) progress("mitigated gap estimate " + std::to_string(a.estimate->gap));
    for (double c : cfg.aem_study_cutoffs) {
      progress("cutoff study at " + std::to_string(c));
      MLTables tables;
      std::vector<AemWeights> weights;
      const TimeSeries ts = mitigate(c, tables, weights);
      CutoffStudy study;
      study.cutoff = c;
      const auto est = try_estimate(ts);
      study.gap = est ? est->gap : std::numeric_limits<double>::quiet_NaN();
      for (Index k = 0; k < tables.completed_steps; ++k) {
        Index b = 0;
        for (const auto& chain : tables.bonds) b = std::max(b, chain[k]);
        study.max_bonds.push_back(b);
      }
      a.cutoff_study.push_back(study);
    }
    rep.aem = std::move(a);
  }
  rep.reached = Stage::estimate;
  return rep;
}

namespace {

std::string path_in(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

nlohmann::json estimate_json(const GapEstimate& g, double gap_ref) {
  std::ostringstream os;
  write_estimate(os, g.estimate);
  nlohmann::json j;
  j["gap"] = g.gap;
  j["gap_dominant_only"] = g.gap_dominant_only;
  j["gap_ref"] = gap_ref;
  j["gap_error"] = g.gap - gap_ref;
  j["relative_error"] = std::abs(g.gap - gap_ref) / std::abs(gap_ref);
  j["estimate"] = nlohmann::json::parse(os.str());
  return j;
}

void write_trace(const std::string& path, const std::vector<std::pair<Index, double>>& trace, double dt,
                 double gap_ref) {
  std::ofstream os(path);
  os << std::setprecision(12) << "# step t gap gap_error\n";
  for (const auto& [r, g] : trace) os << r << ' ' << static_cast<double>(r) * dt << ' ' << g << ' ' << g - gap_ref << '\n';
}

}  // namespace

std::vector<std::string> write_results(const RunReport& rep) {
  const std::string dir = rep.config.output;
  fs::create_directories(dir);
  std::vector<std::string> files;
  auto open = [&](const std::string& name) {
    files.push_back(path_in(dir, name));
    return std::ofstream(files.back());
  };
  open("config.txt") << serialize_config(rep.config);

  nlohmann::json summary;
  summary["e0"] = rep.e0;
  summary["e1"] = rep.e1;
  summary["gap_ref"] = rep.gap_ref;
  summary["excited_multiplicity"] = rep.excited_multiplicity;
  summary["prep_mode"] = rep.config.prep_mode;

  const bool compressed = rep.config.prep_mode == "compressed";
  if (rep.reached >= Stage::compress && compressed) {
    { auto os = open("prep.circuit"); write_circuit(os, rep.prep); }
    { auto os = open("evol.circuit"); write_circuit(os, rep.evol); }
    { auto os = open("prep_gates.jsonl"); write_gate_list_jsonl(os, rep.prep); }
    { auto os = open("evol_gates.jsonl"); write_gate_list_jsonl(os, rep.evol); }
    for (const auto& [name, reports] : {std::pair{"sweeps_prep.txt", &rep.prep_reports},
                                        std::pair{"sweeps_evol.txt", &rep.evol_reports}}) {
      auto os = open(name);
      os << std::setprecision(12) << "# sweep objective overlap_or_fidelity\n";
      for (const auto& r : *reports) os << r.sweep << ' ' << r.objective << ' ' << r.overlap_or_fidelity << '\n';
    }
    summary["prep_overlap"] = rep.prep_overlap;
    summary["evol_fidelity"] = rep.evol_fidelity;
    summary["enhance_overlaps"] = rep.enhance_overlaps;
  }
  summary["a0sq"] = rep.a0sq;
  if (rep.reached >= Stage::simulate) {
    { auto os = open("series.txt"); write_series(os, rep.series); }
    open("run_log.jsonl") << rep.run_log;
    summary["samples"] = rep.series.samples.size();
    summary["stop_reason"] = rep.series.stop_reason;
  }
  if (rep.reached >= Stage::estimate) {
    if (rep.estimate) {
      const auto j = estimate_json(*rep.estimate, rep.gap_ref);
      open("estimate.json") << j.dump(2) << '\n';
      summary["gap"] = rep.estimate->gap;
      summary["relative_error"] = j["relative_error"];
    } else {
      open("estimate.json") << "{\"modes\": []}\n";
    }
    files.push_back(path_in(dir, "gap_trace.txt"));
    write_trace(files.back(), rep.trace, rep.config.dt, rep.gap_ref);
    if (rep.aem) {
      const AemReport& a = *rep.aem;
      { auto os = open("series_aem.txt"); write_series(os, a.series); }
      if (a.estimate) {
        const auto j = estimate_json(*a.estimate, rep.gap_ref);
        open("estimate_aem.json") << j.dump(2) << '\n';
        summary["gap_aem"] = a.estimate->gap;
      }
      files.push_back(path_in(dir, "gap_trace_aem.txt"));
      write_trace(files.back(), a.trace, rep.config.dt, rep.gap_ref);
      auto os = open("aem_tables.jsonl");
      for (Index k = 0; k < a.tables.completed_steps; ++k) {
        nlohmann::json j;
        j["step"] = k + 1;
        j["labels"] = a.labels;
        std::vector<std::vector<double>> m(a.labels.size());
        for (Index i = 0; i < m.size(); ++i)
          for (Index jj = 0; jj < m.size(); ++jj) m[i].push_back(a.tables.m[k](i, jj));
        j["M"] = m;
        j["L"] = std::vector<double>(a.tables.l[k].data(), a.tables.l[k].data() + a.tables.l[k].size());
        j["c"] = std::vector<double>(a.weights[k].c.data(), a.weights[k].c.data() + a.weights[k].c.size());
        j["objective"] = a.weights[k].objective;
        j["ridge"] = a.weights[k].ridge;
        std::vector<Index> bonds;
        for (const auto& chain : a.tables.bonds) bonds.push_back(chain[k]);
        j["bonds"] = bonds;
        os << j.dump() << '\n';
      }
      if (!a.cutoff_study.empty()) {
        auto cs = open("aem_cutoffs.txt");
        cs << std::setprecision(12) << "# cutoff gap gap_error max_bond\n";
        for (const auto& c : a.cutoff_study) {
          const Index b = c.max_bonds.empty() ? 0 : *std::max_element(c.max_bonds.begin(), c.max_bonds.end());
          cs << c.cutoff << ' ' << c.gap << ' ' << c.gap - rep.gap_ref << ' ' << b << '\n';
        }
      }
    }
  }
  open("report.json") << summary.dump(2) << '\n';
  return files;
}

std::vector<std::string> emit_plotdata(const RunReport& rep, const std::string& dir) {
  fs::create_directories(dir);
  std::vector<std::string> files;
  auto open = [&](const std::string& name, const std::string& header) {
    files.push_back(path_in(dir, name));
    std::ofstream os(files.back());
    os << std::setprecision(12) << "# " << header << '\n';
    return os;
  };
  {
    auto os = open("spectrum.txt", "frequency amplitude");
    if (rep.estimate)
      for (const auto& m : rep.estimate->estimate.modes) os << m.frequency << ' ' << m.amplitude() << '\n';
  }
  if (rep.reached >= Stage::estimate) {
    auto os = open("gap_error.txt", "step gap_error");
    for (const auto& [r, g] : rep.trace) os << r << ' ' << g - rep.gap_ref << '\n';
  }
  if (!rep.evol_reports.empty()) {
    auto os = open("evol_infidelity.txt", "sweep one_minus_fidelity");
    for (const auto& r : rep.evol_reports) os << r.sweep << ' ' << 1.0 - r.overlap_or_fidelity << '\n';
  }
  if (!rep.prep_reports.empty()) {
    auto os = open("prep_overlap.txt", "sweep overlap");
    for (const auto& r : rep.prep_reports) os << r.sweep << ' ' << r.overlap_or_fidelity << '\n';
  }
  if (!rep.enhance_overlaps.empty()) {
    auto os = open("enhance_overlap.txt", "iteration overlap");
    for (Index k = 0; k < rep.enhance_overlaps.size(); ++k) os << k + 1 << ' ' << rep.enhance_overlaps[k] << '\n';
  }
  if (rep.aem) {
    auto os = open("gap_error_aem.txt", "step gap_error");
    for (const auto& [r, g] : rep.aem->trace) os << r << ' ' << g - rep.gap_ref << '\n';
    for (const auto& c : rep.aem->cutoff_study) {
      std::ostringstream name;
      name << "aem_bonds_cutoff_" << c.cutoff << ".txt";
      auto bs = open(name.str(), "step max_bond");
      for (Index k = 0; k < c.max_bonds.size(); ++k) bs << k + 1 << ' ' << c.max_bonds[k] << '\n';
    }
  }
  return files;
}

}  // namespace tpde
