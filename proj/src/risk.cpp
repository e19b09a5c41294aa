#include "mrw/risk.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "mrw/kernels.hpp"
#include "mrw/numeric.hpp"
#include "mrw/quadrature.hpp"

namespace mrw {

MagnitudePredictor build_magnitude_predictor(const ModelParams& params, double tau,
                                             int scale_steps, int horizon_steps, int window) {
  params.validate();
  if (tau <= 0.0) throw std::invalid_argument("magnitude predictor: tau must be positive");
  if (scale_steps < 1 || horizon_steps < 0 || window < 1)
    throw std::invalid_argument("magnitude predictor: bad scale/horizon/window");

  const double s = scale_steps * tau, h = horizon_steps * tau;
  const double lam2 = params.lambda2, T = params.T;
  const int p = window;

  MagnitudePredictor out;
  out.params = params;
  out.tau = tau;
  out.scale_steps = scale_steps;
  out.horizon_steps = horizon_steps;
  out.unconditional_variance = lam2 * omega_increment_cov(s, 0.0, T);
  out.z_mean = std::log(params.sigma) + 0.5 * std::log(tau) + kLogAbsGaussMean -
               lam2 * (std::log(T / tau) + 1.5);

  // observation covariance: magnitude part plus iid ln|eps| noise on the diagonal
  Eigen::MatrixXd a(p, p);
  std::vector<double> auto_cov(p);
  for (int d = 0; d < p; ++d) auto_cov[d] = lam2 * omega_increment_cov(tau, d * tau, T);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = auto_cov[std::abs(i - j)];
  a.diagonal().array() += log_abs_gauss_var();

  Eigen::VectorXd c(p);
  for (int j = 0; j < p; ++j)
    c[j] = lam2 * log_kernel_rect_integral(h, h + s, -(j + 1) * tau, -j * tau, T) / (s * tau);

  Eigen::VectorXd w = Eigen::LLT<Eigen::MatrixXd>(a).solve(c);
  out.weights.assign(w.data(), w.data() + p);
  out.conditional_variance = std::max(0.0, out.unconditional_variance - w.dot(c));
  return out;
}

ConditionalMagnitudeLaw conditional_magnitude_law(std::span<const double> z_history,
                                                  const MagnitudePredictor& predictor) {
  const std::size_t p = predictor.weights.size();
  if (z_history.size() < p)
    throw std::invalid_argument("conditional_magnitude_law: history shorter than the window");
  ConditionalMagnitudeLaw law;
  double acc = -predictor.unconditional_variance;  // E[G] = -v_s
  const std::size_t last = z_history.size() - 1;
  for (std::size_t j = 0; j < p; ++j)
    acc += predictor.weights[j] * (z_history[last - j] - predictor.z_mean);
  law.mean = acc;
  law.variance = predictor.conditional_variance;
  return law;
}

ConditionalMagnitudeLaw conditional_magnitude_law(std::span<const double> z_history,
                                                  const ModelParams& params, double tau,
                                                  int scale_steps, int horizon_steps,
                                                  int window) {
  return conditional_magnitude_law(
      z_history, build_magnitude_predictor(params, tau, scale_steps, horizon_steps, window));
}

double var_forecast(const ConditionalMagnitudeLaw& law, double p, double sigma, double s,
                    bool upper_tail_ok) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("var_forecast: p must be in (0,1)");
  if (p == 0.5) return 0.0;
  if (p > 0.5) {
    if (!upper_tail_ok)
      throw std::invalid_argument(
          "var_forecast: p >= 1/2 is not a loss tail; pass upper_tail_ok for the symmetric "
          "threshold");
    return -var_forecast(law, 1.0 - p, sigma, s, false);
  }
  if (!(sigma > 0.0 && s > 0.0))
    throw std::invalid_argument("var_forecast: sigma and s must be positive");
  if (!std::isfinite(law.mean) || !std::isfinite(law.variance) || law.variance < 0.0)
    throw std::invalid_argument("var_forecast: non-finite conditional law");

  const double scale = sigma * std::sqrt(s);
  if (law.variance == 0.0) {
    return -scale * std::exp(law.mean) * normal_quantile(p);
  }
  static const GaussHermite gh = gauss_hermite(64);
  auto exceed = [&](double var_level) {
    return gauss_hermite_mean(gh, law.mean, law.variance,
                              [&](double g) { return normal_cdf(-var_level / (scale * std::exp(g))); });
  };
  const double guess = -scale * std::exp(law.mean) * normal_quantile(p);
  return solve_decreasing([&](double v) { return exceed(v) - p; }, std::max(guess, 1e-12 * scale));
}

namespace {

double xlogq(double n, double q) { return n > 0.0 ? n * std::log(q) : 0.0; }

}  // namespace

KupiecResult kupiec_test(std::span<const int> violations, double p, double level) {
  if (violations.empty()) throw std::invalid_argument("kupiec_test: empty indicator series");
  if (!(p > 0.0 && p < 1.0) || !(level > 0.0 && level < 1.0))
    throw std::invalid_argument("kupiec_test: p and level must be in (0,1)");
  KupiecResult res;
  res.n_obs = violations.size();
  for (int v : violations) res.violations += v != 0;
  const double n = static_cast<double>(res.n_obs);
  const double x = static_cast<double>(res.violations);
  const double rate = x / n;
  const double log_null = xlogq(n - x, 1.0 - p) + xlogq(x, p);
  const double log_alt = xlogq(n - x, 1.0 - rate) + xlogq(x, rate);
  res.stat = std::max(0.0, -2.0 * (log_null - log_alt));
  res.critical = chi2_quantile(1, level);
  res.pass = res.stat <= res.critical;
  return res;
}

ChristoffersenResult christoffersen_test(std::span<const int> violations, double p,
                                         double level) {
  if (violations.size() < 2)
    throw std::invalid_argument("christoffersen_test: need at least two observations");
  ChristoffersenResult res;
  for (std::size_t k = 1; k < violations.size(); ++k) {
    const bool prev = violations[k - 1] != 0, cur = violations[k] != 0;
    if (!prev && !cur) ++res.n00;
    else if (!prev && cur) ++res.n01;
    else if (prev && !cur) ++res.n10;
    else ++res.n11;
  }
  res.coverage_stat = kupiec_test(violations, p, level).stat;

  const double n00 = res.n00, n01 = res.n01, n10 = res.n10, n11 = res.n11;
  const bool row0 = res.n00 + res.n01 > 0, row1 = res.n10 + res.n11 > 0;
  if (!row0 || !row1) {
    res.kupiec_fallback = true;
    res.independence_stat = 0.0;
    res.stat = res.coverage_stat;
    res.critical = chi2_quantile(1, level);
    res.pass = res.stat <= res.critical;
    return res;
  }
  const double pi01 = n01 / (n00 + n01);
  const double pi11 = n11 / (n10 + n11);
  const double pi = (n01 + n11) / (n00 + n01 + n10 + n11);
  const double log_null = xlogq(n00 + n10, 1.0 - pi) + xlogq(n01 + n11, pi);
  const double log_alt = xlogq(n00, 1.0 - pi01) + xlogq(n01, pi01) + xlogq(n10, 1.0 - pi11) +
                         xlogq(n11, pi11);
  res.independence_stat = std::max(0.0, -2.0 * (log_null - log_alt));
  res.stat = res.coverage_stat + res.independence_stat;
  res.critical = chi2_quantile(2, level);
  res.pass = res.stat <= res.critical;
  return res;
}

VarBacktestReport run_var_backtest(std::span<const double> increments, const ModelParams& params,
                                   double tau, double p, int scale_steps, int horizon_steps,
                                   int window, double level) {
  const std::size_t need =
      static_cast<std::size_t>(window) + horizon_steps + scale_steps;
  if (increments.size() < need + 1)
    throw std::invalid_argument("run_var_backtest: series too short for one forecast");

  std::vector<double> z(increments.size());
  for (std::size_t i = 0; i < increments.size(); ++i) {
    if (increments[i] == 0.0)
      throw std::invalid_argument("run_var_backtest: zero increment; adjust ticks at ingestion");
    z[i] = std::log(std::abs(increments[i]));
  }

  const auto predictor =
      build_magnitude_predictor(params, tau, scale_steps, horizon_steps, window);
  const double s = scale_steps * tau;
  const std::size_t count = increments.size() - need + 1;

  VarBacktestReport rep;
  rep.p = p;
  rep.n_obs = count;
  rep.var_series.resize(count);
  rep.violations.resize(count);
  for (std::size_t m = 0; m < count; ++m) {
    const std::size_t end = window - 1 + m;
    const auto law = conditional_magnitude_law(
        std::span<const double>(z.data(), end + 1), predictor);
    const double var_p = var_forecast(law, p, params.sigma, s);
    double realized = 0.0;
    const std::size_t first = end + 1 + horizon_steps;
    for (int u = 0; u < scale_steps; ++u) realized += increments[first + u];
    rep.var_series[m] = var_p;
    rep.violations[m] = realized < -var_p ? 1 : 0;
  }
  rep.kupiec = kupiec_test(rep.violations, p, level);
  rep.christoffersen = christoffersen_test(rep.violations, p, level);
  return rep;
}

}  // namespace mrw
