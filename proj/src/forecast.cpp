#include "mrw/forecast.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "mrw/kernels.hpp"
#include "mrw/numeric.hpp"

namespace mrw {

PredictorKind predictor_kind_from_string(const std::string& s) {
  if (s == "lin") return PredictorKind::lin;
  if (s == "sq") return PredictorKind::sq;
  if (s == "log") return PredictorKind::log_abs;
  throw std::invalid_argument("unknown predictor kind: " + s + " (expected lin|sq|log)");
}

std::string to_string(PredictorKind k) {
  switch (k) {
    case PredictorKind::lin: return "lin";
    case PredictorKind::sq: return "sq";
    default: return "log";
  }
}

void PredictorSpec::validate() const {
  params.validate();
  if (tau <= 0.0) throw std::invalid_argument("PredictorSpec: tau must be positive");
  if (scale_steps < 1) throw std::invalid_argument("PredictorSpec: scale must be >= tau");
  if (horizon_steps < 0) throw std::invalid_argument("PredictorSpec: horizon must be >= 0");
  if (window < 1) throw std::invalid_argument("PredictorSpec: window must be >= 1");
  if (ridge < 0.0) throw std::invalid_argument("PredictorSpec: ridge must be >= 0");
}

namespace {

// Second-moment model of increment transforms. Writing delta_a X =
// sigma sqrt(a) eps e^{G_a} with G_a gaussian, E e^{2G_a} = 1 forces
// G_a ~ N(-v_a, v_a), v_a = lambda2 Cov_Omega,a(0); all transform moments
// below follow from gaussian moment identities.
struct TransformMoments {
  PredictorKind kind;
  ModelParams params;
  double tau;

  double v(double a) const { return params.lambda2 * omega_increment_cov(a, 0.0, params.T); }

  // lambda2-scaled covariance of the magnitudes of the increments over
  // (a1,a2] and (b1,b2]
  double magnitude_cov(double a1, double a2, double b1, double b2) const {
    return params.lambda2 * log_kernel_rect_integral(a1, a2, b1, b2, params.T) /
           ((a2 - a1) * (b2 - b1));
  }

  double mean(double a) const {
    const double s2 = params.sigma * params.sigma;
    switch (kind) {
      case PredictorKind::lin:
        return params.sigma * std::sqrt(2.0 * a / kPi) * std::exp(-0.5 * v(a));
      case PredictorKind::sq:
        return s2 * a;
      default:
        return std::log(params.sigma) + 0.5 * std::log(a) + kLogAbsGaussMean - v(a);
    }
  }

  double variance(double a) const {
    const double s2 = params.sigma * params.sigma;
    switch (kind) {
      case PredictorKind::lin:
        return s2 * a * (1.0 - (2.0 / kPi) * std::exp(-v(a)));
      case PredictorKind::sq:
        return s2 * s2 * a * a * (3.0 * std::exp(4.0 * v(a)) - 1.0);
      default:
        return log_abs_gauss_var() + v(a);
    }
  }

  // covariance of the transforms over two disjoint intervals
  double cov(double a1, double a2, double b1, double b2) const {
    const double la = a2 - a1, lb = b2 - b1;
    const double c = magnitude_cov(a1, a2, b1, b2);
    const double s2 = params.sigma * params.sigma;
    switch (kind) {
      case PredictorKind::lin:
        return (2.0 / kPi) * s2 * std::sqrt(la * lb) *
               std::exp(-0.5 * (v(la) + v(lb))) * std::expm1(c);
      case PredictorKind::sq:
        return s2 * s2 * la * lb * std::expm1(4.0 * c);
      default:
        return c;
    }
  }
};

}  // namespace

LinearPredictor build_predictor(const PredictorSpec& spec) {
  spec.validate();
  const int p = spec.window;
  const double tau = spec.tau, s = spec.s(), h = spec.h();
  TransformMoments m{spec.kind, spec.params, tau};

  // regressor j covers (-(j+1) tau, -j tau]; Toeplitz autocovariances
  std::vector<double> auto_cov(p);
  auto_cov[0] = m.variance(tau);
  for (int d = 1; d < p; ++d) auto_cov[d] = m.cov(-tau, 0.0, -(d + 1) * tau, -d * tau);

  // target covers (h, h+s]
  Eigen::VectorXd cross(p);
  for (int j = 0; j < p; ++j) cross[j] = m.cov(h, h + s, -(j + 1) * tau, -j * tau);

  Eigen::MatrixXd gram(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) gram(i, j) = auto_cov[std::abs(i - j)];
  gram.diagonal().array() += spec.ridge * auto_cov[0];

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    throw std::runtime_error(
        "build_predictor: Gram matrix not positive definite after ridge; eigenvalue range [" +
        std::to_string(ev.minCoeff()) + ", " + std::to_string(ev.maxCoeff()) + "]");
  }
  Eigen::VectorXd w = llt.solve(cross);

  LinearPredictor out;
  out.spec = spec;
  out.weights.assign(w.data(), w.data() + p);
  out.target_mean = m.mean(s);
  out.target_variance = m.variance(s);
  out.regressor_mean = m.mean(tau);
  out.intercept = out.target_mean - w.sum() * out.regressor_mean;
  out.prediction_variance = std::max(0.0, out.target_variance - w.dot(cross));
  return out;
}

namespace {

double apply_transform(double x, PredictorKind kind) {
  switch (kind) {
    case PredictorKind::lin: return std::abs(x);
    case PredictorKind::sq: return x * x;
    default: return std::log(std::abs(x));
  }
}

std::size_t forecast_count(std::size_t n, const PredictorSpec& spec) {
  const std::size_t need = static_cast<std::size_t>(spec.window) + spec.horizon_steps +
                           spec.scale_steps;
  if (n < need)
    throw std::invalid_argument("forecast window plus target does not fit in the series");
  return n - need + 1;
}

}  // namespace

ForecastSeries forecast_series(std::span<const double> increments,
                               const LinearPredictor& predictor) {
  const auto& spec = predictor.spec;
  const std::size_t count = forecast_count(increments.size(), spec);
  const int p = spec.window;

  ForecastSeries out;
  out.first_target = static_cast<std::size_t>(p) + spec.horizon_steps;
  out.prediction.resize(count);
  std::vector<double> transformed(increments.size());
  for (std::size_t i = 0; i < increments.size(); ++i)
    transformed[i] = apply_transform(increments[i], spec.kind);

  for (std::size_t mth = 0; mth < count; ++mth) {
    const std::size_t end = p - 1 + mth;  // most recent window index
    double acc = predictor.intercept;
    for (int j = 0; j < p; ++j) acc += predictor.weights[j] * transformed[end - j];
    out.prediction[mth] = acc;
  }
  if (spec.kind == PredictorKind::log_abs) {
    out.level.resize(count);
    for (std::size_t mth = 0; mth < count; ++mth)
      out.level[mth] = std::exp(out.prediction[mth] + 0.5 * predictor.prediction_variance);
  }
  return out;
}

std::vector<double> realized_targets(std::span<const double> increments,
                                     const PredictorSpec& spec) {
  spec.validate();
  const std::size_t count = forecast_count(increments.size(), spec);
  const std::size_t first = static_cast<std::size_t>(spec.window) + spec.horizon_steps;
  std::vector<double> out(count);
  for (std::size_t mth = 0; mth < count; ++mth) {
    double sum = 0.0;
    for (int u = 0; u < spec.scale_steps; ++u) sum += increments[first + mth + u];
    out[mth] = apply_transform(sum, spec.kind);
  }
  return out;
}

double evaluate_forecasts(std::span<const double> predictions, std::span<const double> realized,
                          ErrorMetric metric) {
  if (predictions.size() != realized.size() || predictions.empty())
    throw std::invalid_argument("evaluate_forecasts: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - realized[i];
    acc += metric == ErrorMetric::mae ? std::abs(e) : e * e;
  }
  return acc / static_cast<double>(predictions.size());
}

}  // namespace mrw
