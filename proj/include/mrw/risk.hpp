#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mrw/params.hpp"

namespace mrw {

// Conditional gaussian law of the magnitude G of the target increment
// (delta_s X = sigma sqrt(s) eps e^G), given a window of past ln|delta_tau X|
// observations. Unconditionally G ~ N(-v_s, v_s).
struct ConditionalMagnitudeLaw {
  double mean = 0.0;
  double variance = 0.0;
};

// Weights and fixed second moments of the magnitude projection; the per-step
// law only re-centers the mean, so rolling evaluation reuses this.
struct MagnitudePredictor {
  ModelParams params;
  double tau = 1.0;
  int scale_steps = 1;
  int horizon_steps = 0;
  std::vector<double> weights;        // weights[j] multiplies Z[t - j tau], centered
  double unconditional_variance = 0;  // v_s
  double conditional_variance = 0;    // v = v_s - w.c, fixed over time
  double z_mean = 0;                  // model mean of ln|delta_tau X|
};

MagnitudePredictor build_magnitude_predictor(const ModelParams& params, double tau,
                                             int scale_steps, int horizon_steps, int window);

// law for the most recent window of z_history (its last `window` entries)
ConditionalMagnitudeLaw conditional_magnitude_law(std::span<const double> z_history,
                                                  const MagnitudePredictor& predictor);

ConditionalMagnitudeLaw conditional_magnitude_law(std::span<const double> z_history,
                                                  const ModelParams& params, double tau,
                                                  int scale_steps, int horizon_steps, int window);

// Loss threshold VaR_p > 0 with P[delta_s X < -VaR_p | law] = p, for
// delta_s X = sigma sqrt(s) eps e^G, eps standard normal independent of
// G ~ N(law.mean, law.variance). Gauss-Hermite quadrature over G plus a
// bracketed root find. p must be in the loss tail (0, 1/2); with
// upper_tail_ok, p in (1/2, 1) returns the symmetric (negative) threshold.
double var_forecast(const ConditionalMagnitudeLaw& law, double p, double sigma, double s,
                    bool upper_tail_ok = false);

struct KupiecResult {
  double stat = 0.0;
  bool pass = false;
  double critical = 0.0;
  std::size_t violations = 0;
  std::size_t n_obs = 0;
};

// Unconditional-coverage likelihood ratio vs chi-square(1).
KupiecResult kupiec_test(std::span<const int> violations, double p, double level = 0.95);

struct ChristoffersenResult {
  double stat = 0.0;  // conditional coverage = coverage + independence
  bool pass = false;
  double critical = 0.0;
  double coverage_stat = 0.0;
  double independence_stat = 0.0;
  bool kupiec_fallback = false;  // set when a transition row is empty
  std::size_t n00 = 0, n01 = 0, n10 = 0, n11 = 0;
};

// Conditional-coverage likelihood ratio vs chi-square(2); falls back to the
// coverage statistic vs chi-square(1) when the transition table degenerates.
ChristoffersenResult christoffersen_test(std::span<const int> violations, double p,
                                         double level = 0.95);

struct VarBacktestReport {
  double p = 0.0;
  std::size_t n_obs = 0;
  std::vector<double> var_series;
  std::vector<int> violations;
  KupiecResult kupiec;
  ChristoffersenResult christoffersen;
};

// Rolling VaR over a series of tau-increments under the given model
// parameters; the violation indicator compares the realized scale-s increment
// against the forecast loss threshold.
VarBacktestReport run_var_backtest(std::span<const double> increments, const ModelParams& params,
                                   double tau, double p, int scale_steps, int horizon_steps,
                                   int window, double level = 0.95);

}  // namespace mrw
