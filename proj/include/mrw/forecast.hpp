#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mrw/params.hpp"

namespace mrw {

enum class PredictorKind { lin, sq, log_abs };
enum class ErrorMetric { mae, mse };

PredictorKind predictor_kind_from_string(const std::string& s);
std::string to_string(PredictorKind k);

// Linear prediction of a scale-s increment transform at horizon h from the
// window of past tau-increment transforms. All second moments come from the
// log-normal small-intermittency model, so the weights are data-independent.
struct PredictorSpec {
  PredictorKind kind = PredictorKind::log_abs;
  ModelParams params;
  double tau = 1.0;
  int scale_steps = 1;    // s = scale_steps * tau
  int horizon_steps = 0;  // h = horizon_steps * tau; 0 = immediately next
  int window = 512;       // P past increments
  double ridge = 1e-8;    // relative to the Gram diagonal

  void validate() const;
  double s() const { return scale_steps * tau; }
  double h() const { return horizon_steps * tau; }
};

struct LinearPredictor {
  PredictorSpec spec;
  std::vector<double> weights;  // weights[j] multiplies the transform at t - j tau
  double intercept = 0.0;
  double prediction_variance = 0.0;  // residual variance of the projection
  double target_mean = 0.0;          // unconditional transform moments
  double target_variance = 0.0;
  double regressor_mean = 0.0;
};

LinearPredictor build_predictor(const PredictorSpec& spec);

// Rolling application. prediction[m] is made from the window of tau-increments
// ending at index window-1+m and refers to the scale-s increment starting at
// increment index first_target + m. For the log_abs kind, level[m] =
// exp(prediction + variance/2) additionally predicts the magnitude scale.
struct ForecastSeries {
  std::vector<double> prediction;
  std::vector<double> level;  // log_abs kind only, empty otherwise
  std::size_t first_target = 0;
};

ForecastSeries forecast_series(std::span<const double> increments,
                               const LinearPredictor& predictor);

// Realized transform values aligned with forecast_series: entry m is the
// transform of the sum of scale_steps tau-increments starting at first_target + m.
std::vector<double> realized_targets(std::span<const double> increments,
                                     const PredictorSpec& spec);

double evaluate_forecasts(std::span<const double> predictions, std::span<const double> realized,
                          ErrorMetric metric);

}  // namespace mrw
