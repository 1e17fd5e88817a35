#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tpde/tensor.hpp"

namespace tpde {

/// s_t = {m(0) - m(pi) - i[m(pi/2) - m(3pi/2)]} / (4 a0sq (1 - a0sq)).
/// Throws DegenerateError unless 0 < a0sq < 1.
cplx combine_signal(double m0, double mhalf, double mpi, double m3half, double a0sq);

struct Sample {
  Index step = 0;
  cplx s;
};

/// Samples at t = step * dt for steps 1, 2, ...; s_0 = 1 holds for every
/// preparation and is supplied implicitly by the estimators.
struct TimeSeries {
  double dt = 0.05;
  std::vector<Sample> samples;
  double a0sq = 0.5;
  Index shots = 0;  ///< 0 for exact probabilities
  double p_step = 0.0;
  std::string stop_reason = "max_steps";

  /// Throws ValidationError unless steps increase strictly from 1.
  void validate() const;
  /// The first `count` samples.
  TimeSeries prefix(Index count) const;
  /// Shot-noise standard deviation of one s_t sample (0 in exact mode).
  double noise_sd() const;
};

/// Columns "step t re im" after a "# key=value ..." header line.
void write_series(std::ostream& os, const TimeSeries& ts);
TimeSeries read_series(std::istream& is);

struct Mode {
  cplx coefficient;        ///< complex amplitude; P_J = |coefficient|
  double frequency = 0.0;  ///< Delta_J
  double decay = 0.0;      ///< per-mode pencil decay; equals alpha after refinement
  double amplitude() const { return std::abs(coefficient); }
};

struct SpectralEstimate {
  std::vector<Mode> modes;
  double alpha = 0.0;
  /// Sum over t of |s_t - model(t)|^2, including t = 0.
  double residual = 0.0;
  bool converged = true;
  Index iterations = 0;

  /// Largest P_J; amplitudes within 1% are broken towards the smaller |Delta_J|.
  /// Throws DegenerateError when there are no modes.
  Index dominant() const;
};

struct PencilConfig {
  /// Pencil columns l and Hankel rows; 0 selects floor(K/2) and floor(K/2) + 1
  /// for K samples.
  Index l = 0;
  Index rows = 0;
  /// Retained rank; 0 selects it from the singular-value threshold.
  Index num_modes = 0;
  double rel_threshold = 1e-10;
  /// Per-sample noise level; singular values below 2 noise_sd (sqrt(rows) + sqrt(l))
  /// are dropped.
  double noise_sd = 0.0;
};

/// Pencil settings for a series: noise-scaled floor in shot mode.
PencilConfig default_pencil(const TimeSeries& ts);

/// Matrix-pencil modes with least-squares amplitudes. Throws
/// InsufficientDataError if the series is shorter than l + rows - 1.
SpectralEstimate pencil_initial_guess(const TimeSeries& ts, const PencilConfig& cfg);

/// Model value sum_J c_J exp(-(i Delta_J + alpha) t).
cplx evaluate_model(const SpectralEstimate& e, double t);
double residual(const TimeSeries& ts, const SpectralEstimate& e);

enum class RefineScope { all_modes, dominant_only };

struct RefineOptions {
  Index max_iterations = 500;
  double gradient_tol = 1e-12;
  RefineScope scope = RefineScope::all_modes;
};

/// Damped Gauss-Newton fit of amplitudes, frequencies and a shared alpha >= 0.
/// Steps are accepted only when the residual drops. With dominant_only, the
/// other modes stay fixed.
SpectralEstimate refine_fit(const TimeSeries& ts, const SpectralEstimate& guess,
                            const RefineOptions& opt = {});

struct GapEstimate {
  double gap = 0.0;             ///< dominant Delta after the joint fit
  double gap_dominant_only = 0.0;
  SpectralEstimate guess;
  SpectralEstimate estimate;
};

GapEstimate estimate_gap(const TimeSeries& ts);
GapEstimate estimate_gap(const TimeSeries& ts, const PencilConfig& cfg);

/// Gap estimated from the first r samples, for r = min_samples .. K.
std::vector<std::pair<Index, double>> gap_trace(const TimeSeries& ts, Index min_samples = 2);

/// Four m'(theta) values for a step, in kPhaseAngles order.
using StepMeasure = std::function<std::array<double, 4>(Index step)>;

/// Runs steps 1..max_steps and stops early once |s_t| < stop_threshold for
/// `window` consecutive steps.
TimeSeries collect_series(const StepMeasure& measure, double a0sq, double dt, Index max_steps,
                          double stop_threshold, Index window = 3);

/// JSON object with modes, alpha, residual and convergence flags.
void write_estimate(std::ostream& os, const SpectralEstimate& e);

}  // namespace tpde
