#include "tpde/signal.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "json.hpp"
#include "tpde/errors.hpp"

namespace tpde {

cplx combine_signal(double m0, double mhalf, double mpi, double m3half, double a0sq) {
  if (!(a0sq > 0.0 && a0sq < 1.0)) {
    throw DegenerateError("ancilla branch weight must lie strictly between 0 and 1");
  }
  return cplx(m0 - mpi, -(mhalf - m3half)) / (4.0 * a0sq * (1.0 - a0sq));
}

void TimeSeries::validate() const {
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  for (Index k = 0; k < samples.size(); ++k) {
    if (samples[k].step != k + 1) throw ValidationError("series steps must run 1, 2, ... without gaps");
  }
}

TimeSeries TimeSeries::prefix(Index count) const {
  TimeSeries out = *this;
  out.samples.resize(std::min(count, samples.size()));
  return out;
}

double TimeSeries::noise_sd() const {
  if (shots == 0) return 0.0;
  return 1.0 / (4.0 * a0sq * (1.0 - a0sq) * std::sqrt(static_cast<double>(shots)));
}

void write_series(std::ostream& os, const TimeSeries& ts) {
  os << std::setprecision(17);
  os << "# dt=" << ts.dt << " a0sq=" << ts.a0sq << " shots=" << ts.shots << " p_step=" << ts.p_step
     << " stop_reason=" << ts.stop_reason << '\n';
  os << "# step t re im\n";
  for (const auto& s : ts.samples) {
    os << s.step << ' ' << static_cast<double>(s.step) * ts.dt << ' ' << s.s.real() << ' '
       << s.s.imag() << '\n';
  }
}

TimeSeries read_series(std::istream& is) {
  TimeSeries ts;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string tok;
      ls >> tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
        if (key == "dt") ts.dt = std::stod(value);
        else if (key == "a0sq") ts.a0sq = std::stod(value);
        else if (key == "shots") ts.shots = std::stoul(value);
        else if (key == "p_step") ts.p_step = std::stod(value);
        else if (key == "stop_reason") ts.stop_reason = value;
      }
      continue;
    }
    Sample s;
    double t = 0.0, re = 0.0, im = 0.0;
    if (!(ls >> s.step >> t >> re >> im)) throw ValidationError("malformed series line: " + line);
    s.s = cplx(re, im);
    ts.samples.push_back(s);
  }
  ts.validate();
  return ts;
}

Index SpectralEstimate::dominant() const {
  if (modes.empty()) throw DegenerateError("no signal: spectral estimate has no modes");
  Index best = 0;
  for (Index j = 1; j < modes.size(); ++j) {
    const double a = modes[j].amplitude(), b = modes[best].amplitude();
    if (a > 1.01 * b) {
      best = j;
    } else if (a >= b / 1.01 && std::abs(modes[j].frequency) < std::abs(modes[best].frequency)) {
      best = j;
    }
  }
  return best;
}

namespace {

// Data points (t, s) including the implicit s_0 = 1.
struct Data {
  std::vector<double> t;
  std::vector<cplx> s;
};

Data data_of(const TimeSeries& ts) {
  ts.validate();
  Data d;
  d.t.push_back(0.0);
  d.s.push_back(1.0);
  for (const auto& x : ts.samples) {
    d.t.push_back(static_cast<double>(x.step) * ts.dt);
    d.s.push_back(x.s);
  }
  return d;
}

double residual_of(const Data& d, const SpectralEstimate& e) {
  double r = 0.0;
  for (Index k = 0; k < d.t.size(); ++k) r += std::norm(d.s[k] - evaluate_model(e, d.t[k]));
  return r;
}

// Least-squares amplitudes for fixed exponents z_J(t) = exp(-(i Delta_J + decay_J) t).
void fit_amplitudes(const Data& d, std::vector<Mode>& modes, bool shared, double alpha) {
  if (modes.empty()) return;
  CMatrix v(d.t.size(), modes.size());
  CVector y(d.t.size());
  for (Index k = 0; k < d.t.size(); ++k) {
    y(k) = d.s[k];
    for (Index j = 0; j < modes.size(); ++j) {
      const double decay = shared ? alpha : modes[j].decay;
      v(k, j) = std::exp(-cplx(decay, modes[j].frequency) * d.t[k]);
    }
  }
  const CVector c = v.colPivHouseholderQr().solve(y);
  for (Index j = 0; j < modes.size(); ++j) modes[j].coefficient = c(j);
}

}  // namespace

PencilConfig default_pencil(const TimeSeries& ts) {
  PencilConfig cfg;
  cfg.noise_sd = ts.noise_sd();
  return cfg;
}

cplx evaluate_model(const SpectralEstimate& e, double t) {
  cplx v = 0.0;
  for (const auto& m : e.modes) v += m.coefficient * std::exp(-cplx(e.alpha, m.frequency) * t);
  return v;
}

double residual(const TimeSeries& ts, const SpectralEstimate& e) { return residual_of(data_of(ts), e); }

SpectralEstimate pencil_initial_guess(const TimeSeries& ts, const PencilConfig& cfg) {
  const Data d = data_of(ts);
  const Index k = ts.samples.size();
  const Index l = cfg.l ? cfg.l : k / 2;
  const Index rows = cfg.rows ? cfg.rows : k / 2 + 1;
  if (l == 0 || l + rows - 1 > k) {
    throw InsufficientDataError("series too short for the requested pencil dimensions");
  }
  const double dt = ts.dt;
  CMatrix a0(rows, l), a1(rows, l);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < l; ++j) {
      a0(i, j) = d.s[i + j];
      a1(i, j) = d.s[i + j + 1];
    }
  }
  Eigen::BDCSVD<CMatrix> svd(a0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Index r = 0;
  if (cfg.num_modes) {
    r = std::min<Index>(cfg.num_modes, static_cast<Index>(sv.size()));
  } else {
    const double floor = std::max(cfg.rel_threshold * sv(0), 2.0 * cfg.noise_sd *
                                                                 (std::sqrt(double(rows)) + std::sqrt(double(l))));
    while (r < static_cast<Index>(sv.size()) && sv(r) > floor) ++r;
  }
  SpectralEstimate e;
  if (r == 0) {
    e.residual = residual_of(d, e);
    return e;
  }
  const CMatrix ur = svd.matrixU().leftCols(r);
  const CMatrix vr = svd.matrixV().leftCols(r);
  const CMatrix z = sv.head(r).cwiseInverse().asDiagonal() * (ur.adjoint() * a1 * vr);
  Eigen::ComplexEigenSolver<CMatrix> eig(z);
  for (Index j = 0; j < r; ++j) {
    const cplx lambda = eig.eigenvalues()(j);
    Mode m;
    m.frequency = -std::arg(lambda) / dt;
    m.decay = -std::log(std::abs(lambda)) / dt;
    e.modes.push_back(m);
  }
  fit_amplitudes(d, e.modes, false, 0.0);
  double weight = 0.0, alpha = 0.0;
  for (const auto& m : e.modes) {
    weight += m.amplitude();
    alpha += m.amplitude() * m.decay;
  }
  e.alpha = weight > 0.0 ? std::max(0.0, alpha / weight) : 0.0;
  e.residual = residual_of(d, e);
  return e;
}

SpectralEstimate refine_fit(const TimeSeries& ts, const SpectralEstimate& guess,
                            const RefineOptions& opt) {
  if (guess.modes.empty()) throw DegenerateError("refinement needs at least one mode");
  const Data d = data_of(ts);
  const Index n = d.t.size();
  std::vector<Index> free_modes;
  if (opt.scope == RefineScope::dominant_only) {
    free_modes.push_back(guess.dominant());
  } else {
    for (Index j = 0; j < guess.modes.size(); ++j) free_modes.push_back(j);
  }
  const Index np = 3 * free_modes.size() + 1;

  SpectralEstimate cur = guess;
  cur.residual = residual_of(d, cur);
  double scale = 0.0;
  for (const auto& s : d.s) scale += std::norm(s);
  scale = std::max(1.0, scale);

  double lambda = 1e-3;
  bool converged = false;
  Index it = 0;
  Eigen::MatrixXd jac(2 * n, np);
  Eigen::VectorXd res(2 * n);
  for (; it < opt.max_iterations; ++it) {
    for (Index k = 0; k < n; ++k) {
      const double t = d.t[k];
      cplx total = 0.0;
      for (Index q = 0; q < free_modes.size(); ++q) {
        const Mode& m = cur.modes[free_modes[q]];
        const cplx e = std::exp(-cplx(cur.alpha, m.frequency) * t);
        const cplx dre = e, dim = cplx(0.0, 1.0) * e, dfreq = cplx(0.0, -t) * m.coefficient * e;
        jac(2 * k, 3 * q) = dre.real();
        jac(2 * k + 1, 3 * q) = dre.imag();
        jac(2 * k, 3 * q + 1) = dim.real();
        jac(2 * k + 1, 3 * q + 1) = dim.imag();
        jac(2 * k, 3 * q + 2) = dfreq.real();
        jac(2 * k + 1, 3 * q + 2) = dfreq.imag();
      }
      for (const auto& m : cur.modes) total += m.coefficient * std::exp(-cplx(cur.alpha, m.frequency) * t);
      const cplx dalpha = -t * total;
      jac(2 * k, np - 1) = dalpha.real();
      jac(2 * k + 1, np - 1) = dalpha.imag();
      const cplx r = d.s[k] - total;
      res(2 * k) = r.real();
      res(2 * k + 1) = r.imag();
    }
    const Eigen::VectorXd grad = jac.transpose() * res;
    // alpha pinned at its bound contributes no descent direction.
    Eigen::VectorXd g = grad;
    if (cur.alpha <= 0.0 && g(np - 1) < 0.0) g(np - 1) = 0.0;
    if (g.lpNorm<Eigen::Infinity>() <= opt.gradient_tol * scale) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const double floor = 1e-12 * jtj.diagonal().maxCoeff();
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd a = jtj;
      for (Index p = 0; p < np; ++p) a(p, p) += lambda * (jtj(p, p) + floor);
      const Eigen::VectorXd step = a.ldlt().solve(grad);
      SpectralEstimate trial = cur;
      for (Index q = 0; q < free_modes.size(); ++q) {
        Mode& m = trial.modes[free_modes[q]];
        m.coefficient += cplx(step(3 * q), step(3 * q + 1));
        m.frequency += step(3 * q + 2);
      }
      trial.alpha = std::max(0.0, cur.alpha + step(np - 1));
      trial.residual = residual_of(d, trial);
      if (trial.residual < cur.residual) {
        const double drop = cur.residual - trial.residual;
        cur = trial;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (drop <= 1e-15 * scale) converged = true;
        break;
      }
      lambda *= 4.0;
    }
    // No decrease is possible at working precision: a stationary point.
    if (!accepted || converged) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    SpectralEstimate out = guess;
    out.residual = residual_of(d, guess);
    out.converged = false;
    out.iterations = it;
    return out;
  }
  for (auto& m : cur.modes) m.decay = cur.alpha;
  cur.converged = true;
  cur.iterations = it;
  return cur;
}

GapEstimate estimate_gap(const TimeSeries& ts, const PencilConfig& cfg) {
  GapEstimate g;
  g.guess = pencil_initial_guess(ts, cfg);
  if (g.guess.modes.empty()) throw DegenerateError("no signal: pencil retained no modes");
  g.estimate = refine_fit(ts, g.guess);
  g.gap = g.estimate.modes[g.estimate.dominant()].frequency;
  RefineOptions dom;
  dom.scope = RefineScope::dominant_only;
  const SpectralEstimate single = refine_fit(ts, g.guess, dom);
  g.gap_dominant_only = single.modes[single.dominant()].frequency;
  return g;
}

GapEstimate estimate_gap(const TimeSeries& ts) { return estimate_gap(ts, default_pencil(ts)); }

std::vector<std::pair<Index, double>> gap_trace(const TimeSeries& ts, Index min_samples) {
  std::vector<std::pair<Index, double>> out;
  for (Index r = std::max<Index>(min_samples, 1); r <= ts.samples.size(); ++r) {
    double gap = std::numeric_limits<double>::quiet_NaN();
    try {
      gap = estimate_gap(ts.prefix(r)).gap;
    } catch (const Error&) {
    }
    out.emplace_back(r, gap);
  }
  return out;
}

TimeSeries collect_series(const StepMeasure& measure, double a0sq, double dt, Index max_steps,
                          double stop_threshold, Index window) {
  TimeSeries ts;
  ts.dt = dt;
  ts.a0sq = a0sq;
  Index below = 0;
  for (Index step = 1; step <= max_steps; ++step) {
    const auto m = measure(step);
    const cplx s = combine_signal(m[0], m[1], m[2], m[3], a0sq);
    ts.samples.push_back({step, s});
    below = std::abs(s) < stop_threshold ? below + 1 : 0;
    if (window > 0 && below >= window) {
      ts.stop_reason = "no_signal";
      break;
    }
  }
  return ts;
}

void write_estimate(std::ostream& os, const SpectralEstimate& e) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : e.modes) {
    modes.push_back({{"amplitude", m.amplitude()},
                     {"coefficient", {m.coefficient.real(), m.coefficient.imag()}},
                     {"frequency", m.frequency},
                     {"decay", m.decay}});
  }
  nlohmann::json j{{"modes", modes},
                   {"alpha", e.alpha},
                   {"residual", e.residual},
                   {"converged", e.converged},
                   {"iterations", e.iterations}};
  if (!e.modes.empty()) j["dominant"] = e.dominant();
  os << j.dump(2) << '\n';
}

}  // namespace tpde
