#include "mrw/estimate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>

#include "mrw/kernels.hpp"
#include "mrw/numeric.hpp"
#include "mrw/optimize.hpp"
#include "mrw/rng.hpp"

namespace mrw {

namespace {

// Smooth in-band model covariance of Z at lag h (in tau units); see header.
double model_cov(double lambda2, double ln_T, double tau, int h, double f_h) {
  return lambda2 * (ln_T + 1.5 - std::log(h * tau) + f_h);
}

// Model mean of Z = ln|delta X|; the sqrt(tau) diffusive factor contributes
// (ln tau)/2 on top of the tau-independent magnitude level.
double model_mean(double ln_sigma, double lambda2, double ln_T, double tau) {
  return ln_sigma + 0.5 * std::log(tau) + kLogAbsGaussMean -
         lambda2 * (ln_T + 1.5 - std::log(tau));
}

double lag_regressor(int n) { return f_shape(static_cast<double>(n)) - std::log(n); }

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::low_frequency: return "low_frequency";
    case Regime::high_frequency: return "high_frequency";
    default: return "indeterminate";
  }
}

std::vector<int> GmmConfig::default_lags(int count, int lo, int hi) {
  if (count < 1 || lo < 1 || hi <= lo) throw std::invalid_argument("default_lags: bad grid");
  std::set<int> grid;
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i) {
    double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    grid.insert(static_cast<int>(std::lround(std::exp(llo + t * (lhi - llo)))));
  }
  // rounding collides at small lags; backfill with the smallest missing ones
  for (int v = lo; static_cast<int>(grid.size()) < count && v <= hi; ++v) grid.insert(v);
  std::vector<int> out(grid.begin(), grid.end());
  out.resize(std::min<std::size_t>(out.size(), count));
  return out;
}

void GmmConfig::validate() const {
  if (lags.size() < 4) throw std::invalid_argument("GmmConfig: need more than 3 lags");
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (lags[i] < 1 || (i > 0 && lags[i] <= lags[i - 1]))
      throw std::invalid_argument("GmmConfig: lags must be strictly increasing positives");
  }
  if (max_outer_iterations < 1 || outer_tolerance <= 0.0)
    throw std::invalid_argument("GmmConfig: bad outer iteration settings");
  if (lambda2_lo <= 0.0 || lambda2_hi >= 0.5 || lambda2_lo >= lambda2_hi)
    throw std::invalid_argument("GmmConfig: lambda2 bounds must sit inside (0, 1/2)");
}

std::vector<double> log_abs_series(std::span<const double> increments) {
  std::vector<double> z(increments.size());
  for (std::size_t i = 0; i < increments.size(); ++i) {
    if (increments[i] == 0.0)
      throw std::invalid_argument(
          "log_abs_series: zero increment at index " + std::to_string(i) +
          "; apply tick adjustment at ingestion");
    z[i] = std::log(std::abs(increments[i]));
  }
  return z;
}

std::vector<double> empirical_log_cov(std::span<const double> z, const std::vector<int>& lags) {
  const std::size_t n = z.size();
  if (n == 0) throw std::invalid_argument("empirical_log_cov: empty series");
  for (int h : lags) {
    if (h < 0 || static_cast<std::size_t>(h) >= n)
      throw std::invalid_argument("empirical_log_cov: lag outside the sample");
  }
  double mu = mean(z);
  std::vector<double> out(lags.size());
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const std::size_t h = static_cast<std::size_t>(lags[i]);
    double acc = 0.0;
    for (std::size_t k = h; k < n; ++k) acc += (z[k] - mu) * (z[k - h] - mu);
    out[i] = acc / static_cast<double>(n);
  }
  return out;
}

LogMomentStats LogMomentStats::from_series(std::span<const double> z,
                                           const std::vector<int>& lags) {
  const std::size_t n = z.size();
  if (n == 0) throw std::invalid_argument("LogMomentStats: empty series");
  LogMomentStats st;
  st.n = n;
  st.lags = lags;
  double acc = 0.0;
  for (double v : z) acc += std::exp(2.0 * v);
  st.mean_exp_2z = acc / static_cast<double>(n);
  st.s_cross.resize(lags.size());
  st.s_tail.resize(lags.size());
  st.s_head.resize(lags.size());
  st.f_at_lag.resize(lags.size());
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const std::size_t h = static_cast<std::size_t>(lags[i]);
    if (h >= n) throw std::invalid_argument("LogMomentStats: lag outside the sample");
    double cross = 0.0, tail = 0.0, head = 0.0;
    for (std::size_t k = h; k < n; ++k) {
      cross += z[k] * z[k - h];
      tail += z[k];
      head += z[k - h];
    }
    st.s_cross[i] = cross;
    st.s_tail[i] = tail;
    st.s_head[i] = head;
    st.f_at_lag[i] = f_shape(static_cast<double>(lags[i]));
  }
  return st;
}

std::vector<double> gmm_moment_function(const LogMomentStats& stats, double tau,
                                        const std::array<double, 3>& theta) {
  const auto [ln_sigma, lambda2, ln_T] = theta;
  const double n = static_cast<double>(stats.n);
  std::vector<double> g(stats.lags.size() + 1);
  g[0] = stats.mean_exp_2z - std::exp(2.0 * ln_sigma) * tau;
  const double mu = model_mean(ln_sigma, lambda2, ln_T, tau);
  for (std::size_t i = 0; i < stats.lags.size(); ++i) {
    const double cnt = n - stats.lags[i];
    const double emp =
        (stats.s_cross[i] - mu * (stats.s_tail[i] + stats.s_head[i]) + cnt * mu * mu) / n;
    g[i + 1] = emp - model_cov(lambda2, ln_T, tau, stats.lags[i], stats.f_at_lag[i]);
  }
  return g;
}

namespace {

Eigen::VectorXd moment_vector(const LogMomentStats& stats, double tau,
                              const std::array<double, 3>& theta) {
  auto g = gmm_moment_function(stats, tau, theta);
  return Eigen::Map<Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
}

// Bartlett long-run covariance of the per-observation moment contributions.
Eigen::MatrixXd hac_covariance(const std::vector<double>& z, double tau,
                               const std::array<double, 3>& theta, const LogMomentStats& stats,
                               int bandwidth) {
  const auto [ln_sigma, lambda2, ln_T] = theta;
  const Eigen::Index q = static_cast<Eigen::Index>(stats.lags.size()) + 1;
  const Eigen::Index n = static_cast<Eigen::Index>(z.size());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(q, n);
  const double var_target = std::exp(2.0 * ln_sigma) * tau;
  const double mu = model_mean(ln_sigma, lambda2, ln_T, tau);
  for (Eigen::Index k = 0; k < n; ++k) f(0, k) = std::exp(2.0 * z[k]) - var_target;
  for (std::size_t i = 0; i < stats.lags.size(); ++i) {
    const Eigen::Index h = stats.lags[i];
    const double c = model_cov(lambda2, ln_T, tau, stats.lags[i], stats.f_at_lag[i]);
    for (Eigen::Index k = h; k < n; ++k)
      f(static_cast<Eigen::Index>(i) + 1, k) = (z[k] - mu) * (z[k - h] - mu) - c;
  }
  f.colwise() -= f.rowwise().mean();
  const double dn = static_cast<double>(n);
  Eigen::MatrixXd v = (f * f.transpose()) / dn;
  for (int j = 1; j <= bandwidth; ++j) {
    Eigen::MatrixXd g =
        (f.rightCols(n - j) * f.leftCols(n - j).transpose()) / dn;
    v += (1.0 - static_cast<double>(j) / (bandwidth + 1)) * (g + g.transpose());
  }
  return v;
}

}  // namespace

GmmResult gmm_estimate(std::span<const double> returns, double tau, const GmmConfig& config) {
  config.validate();
  if (tau <= 0.0) throw std::invalid_argument("gmm_estimate: tau must be positive");
  const int max_lag = config.lags.back();
  if (returns.size() < static_cast<std::size_t>(4 * max_lag))
    throw std::invalid_argument("gmm_estimate: need at least 4 * max lag observations");

  const auto z = log_abs_series(returns);
  const std::size_t n = z.size();
  const auto stats = LogMomentStats::from_series(z, config.lags);
  const double span = static_cast<double>(n) * tau;

  const std::vector<std::pair<double, double>> bounds = {
      {config.lnsigma_lo, config.lnsigma_hi},
      {config.lambda2_lo, config.lambda2_hi},
      {std::log(tau), std::log(100.0 * span)}};

  // initial point: variance from the second moment, lambda2 from a two-lag
  // covariance difference, ln T from inverting the lag-1 covariance
  const auto r_init = empirical_log_cov(z, {1, 2, 16});
  const double lambda2_0 =
      std::clamp((r_init[1] - r_init[2]) / (lag_regressor(2) - lag_regressor(16)), 1e-4, 0.4);
  const double ln_T0 = std::clamp(
      r_init[0] / lambda2_0 - 1.5 - f_shape(1.0) + std::log(tau), bounds[2].first,
      bounds[2].second);
  std::vector<double> theta = {0.5 * std::log(stats.mean_exp_2z / tau),
                               std::clamp(lambda2_0, bounds[1].first, bounds[1].second), ln_T0};
  theta[0] = std::clamp(theta[0], bounds[0].first, bounds[0].second);

  const Eigen::Index q = static_cast<Eigen::Index>(config.lags.size()) + 1;
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(q, q);
  const int bandwidth = static_cast<int>(1.3 * std::cbrt(static_cast<double>(n)));

  GmmResult res;
  res.lags = config.lags;
  std::string weighting_used = "identity";
  double best_value = 0.0;

  for (int outer = 0; outer < config.max_outer_iterations; ++outer) {
    auto objective = [&](const std::vector<double>& p) {
      Eigen::VectorXd g = moment_vector(stats, tau, {p[0], p[1], p[2]});
      return g.dot(w * g);
    };
    const double start_value = objective(theta);

    SimplexOptions opt;
    opt.max_iterations = config.optimizer_max_iterations;
    opt.initial_step = {std::max(0.1 * std::abs(theta[0]), 0.1),
                        std::max(0.1 * std::abs(theta[1]), 0.004),
                        std::max(0.1 * std::abs(theta[2]), 0.5)};

    std::vector<double> best_x = theta;
    double best_f = start_value;
    Rng restart_rng(12345);
    for (int rep = 0; rep < config.optimizer_restarts; ++rep) {
      std::vector<double> start = theta;
      if (rep > 0) {
        const double scatter[3] = {0.05, 0.002, 0.3};
        double mult[3], add[3];
        for (double& v : mult) v = restart_rng.gaussian();
        for (double& v : add) v = restart_rng.gaussian();
        for (int i = 0; i < 3; ++i) {
          start[i] = std::clamp(theta[i] * (1.0 + 0.2 * mult[i]) + scatter[i] * add[i],
                                bounds[i].first, bounds[i].second);
        }
      }
      auto r = nelder_mead(objective, start, bounds, opt);
      if (r.value < best_f) {
        best_f = r.value;
        best_x = r.x;
      }
    }

    if (best_f > start_value * (1.0 + 1e-9) + 1e-300) {
      res.objective_monotone = false;
      res.notes.push_back("inner minimization failed to improve at outer iteration " +
                          std::to_string(outer + 1));
    }
    weighting_used = outer == 0 ? "identity" : ("hac_bartlett(bandwidth=" +
                                                std::to_string(bandwidth) + ")");
    best_value = best_f;
    res.outer_iterations = outer + 1;

    const double delta = std::max({std::abs(best_x[0] - theta[0]), std::abs(best_x[1] - theta[1]),
                                   std::abs(best_x[2] - theta[2])});
    theta = best_x;
    if (outer > 0 && delta < config.outer_tolerance) {
      res.converged = true;
      break;
    }
    if (outer + 1 == config.max_outer_iterations) break;

    Eigen::MatrixXd v = hac_covariance(z, tau, {theta[0], theta[1], theta[2]}, stats, bandwidth);
    double ridge = 1e-8 * v.trace() / static_cast<double>(q);
    if (!(ridge > 0.0)) ridge = 1e-12;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(
        v + ridge * Eigen::MatrixXd::Identity(q, q));
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      ridge *= 1e6;
      ldlt.compute(v + ridge * Eigen::MatrixXd::Identity(q, q));
      res.notes.push_back("long-run covariance strongly ridged at outer iteration " +
                          std::to_string(outer + 1));
    }
    w = ldlt.solve(Eigen::MatrixXd::Identity(q, q));
  }

  if (!res.converged)
    res.notes.push_back("outer iteration stopped at the cap without meeting the tolerance");
  res.ln_sigma = theta[0];
  res.lambda2 = theta[1];
  res.ln_T = theta[2];
  res.objective = best_value;
  res.weighting = weighting_used;
  res.regime = regime_diagnostic(res.ln_T, span, config.regime_band);
  return res;
}

Regime regime_diagnostic(double ln_T_hat, double span, double band) {
  if (!(span > 0.0) || !(band > 0.0))
    throw std::invalid_argument("regime_diagnostic: span and band must be positive");
  const double ceiling = std::log(span) - 1.5;
  if (std::abs(ln_T_hat - ceiling) < band) return Regime::high_frequency;
  if (ln_T_hat < ceiling - band) return Regime::low_frequency;
  return Regime::indeterminate;
}

double hf_lambda2(std::span<const double> z, int n, int n_prime, double tau, double T_bound) {
  if (n == n_prime) throw std::invalid_argument("hf_lambda2: lags must differ");
  if (n < 1 || n_prime < 1 || n * tau >= T_bound || n_prime * tau >= T_bound)
    throw std::invalid_argument("hf_lambda2: lags must satisfy 0 < n tau < T_bound");
  const auto r = empirical_log_cov(z, {n, n_prime});
  const double denom = lag_regressor(n) - lag_regressor(n_prime);
  // f(n) - ln(n) is strictly decreasing, so distinct lags cannot collide
  if (denom == 0.0) throw std::logic_error("hf_lambda2: degenerate lag pair");
  return (r[0] - r[1]) / denom;
}

double hf_lambda2_ols(std::span<const double> z, const std::vector<int>& lags, double tau,
                      double T_bound) {
  if (lags.size() < 2) throw std::invalid_argument("hf_lambda2_ols: need at least two lags");
  for (int n : lags) {
    if (n < 1 || n * tau >= T_bound)
      throw std::invalid_argument("hf_lambda2_ols: lags must satisfy 0 < n tau < T_bound");
  }
  const auto r = empirical_log_cov(z, lags);
  double mx = 0.0, my = 0.0;
  std::vector<double> x(lags.size());
  for (std::size_t i = 0; i < lags.size(); ++i) {
    x[i] = lag_regressor(lags[i]);
    mx += x[i];
    my += r[i];
  }
  mx /= static_cast<double>(lags.size());
  my /= static_cast<double>(lags.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (r[i] - my);
  }
  return sxy / sxx;
}

namespace {

McInterval percentile_interval(std::vector<double> draws, double level) {
  std::sort(draws.begin(), draws.end());
  McInterval iv;
  iv.lo = percentile(draws, 0.5 * (1.0 - level));
  iv.hi = percentile(draws, 0.5 * (1.0 + level));
  return iv;
}

}  // namespace

McCiResult mc_confidence_interval(const SimulationSpec& spec, const std::string& estimator,
                                  std::size_t n_realizations, double level, std::uint64_t seed,
                                  int threads) {
  spec.validate();
  if (n_realizations < 100)
    throw std::invalid_argument("mc_confidence_interval: need at least 100 realizations");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("mc_confidence_interval: level must be in (0,1)");
  if (estimator != "gmm" && estimator != "hf_ols")
    throw std::invalid_argument("mc_confidence_interval: unknown estimator " + estimator);

  McCiResult out;
  out.n_realizations = n_realizations;
  out.level = level;

  if (estimator == "gmm") {
    std::vector<double> ls(n_realizations), l2(n_realizations), lt(n_realizations);
    simulate_ensemble(
        spec, Process::mrw, seed, n_realizations,
        [&](std::size_t i, std::vector<double>&& path) {
          auto fit = gmm_estimate(path, spec.tau, GmmConfig{});
          ls[i] = fit.ln_sigma;
          l2[i] = fit.lambda2;
          lt[i] = fit.ln_T;
        },
        threads < 0 ? 0 : static_cast<unsigned>(threads));
    out.intervals["ln_sigma"] = percentile_interval(ls, level);
    out.intervals["lambda2"] = percentile_interval(l2, level);
    out.intervals["ln_T"] = percentile_interval(lt, level);
    out.draws["ln_sigma"] = std::move(ls);
    out.draws["lambda2"] = std::move(l2);
    out.draws["ln_T"] = std::move(lt);
    return out;
  }

  std::vector<int> lags;
  for (int v : {2, 3, 4, 6, 8, 11, 16, 23, 32, 45, 64}) {
    if (v * spec.tau < spec.params.T && static_cast<std::size_t>(4 * v) < spec.n) lags.push_back(v);
  }
  if (lags.size() < 2)
    throw std::invalid_argument("mc_confidence_interval: series too short for hf_ols lags");
  std::vector<double> l2(n_realizations);
  simulate_ensemble(
      spec, Process::mrw, seed, n_realizations,
      [&](std::size_t i, std::vector<double>&& path) {
        auto z = log_abs_series(path);
        l2[i] = hf_lambda2_ols(z, lags, spec.tau, spec.params.T);
      },
      threads < 0 ? 0 : static_cast<unsigned>(threads));
  out.intervals["lambda2"] = percentile_interval(l2, level);
  out.draws["lambda2"] = std::move(l2);
  return out;
}

}  // namespace mrw
