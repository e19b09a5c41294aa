#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mrw/params.hpp"
#include "mrw/simulate.hpp"

namespace mrw {

enum class Regime { low_frequency, high_frequency, indeterminate };

std::string to_string(Regime r);

struct GmmConfig {
  std::vector<int> lags = default_lags();
  int max_outer_iterations = 10;
  double outer_tolerance = 1e-6;
  int optimizer_restarts = 3;
  int optimizer_max_iterations = 600;
  double lnsigma_lo = -20.0, lnsigma_hi = 20.0;
  double lambda2_lo = 1e-6, lambda2_hi = 0.49;
  // ln T bounds are data-dependent: [ln tau, ln(100 * N * tau)]
  double regime_band = 1.0;

  static std::vector<int> default_lags(int count = 43, int lo = 1, int hi = 150);
  void validate() const;
};

// theta order used throughout: (ln sigma, lambda2, ln T)
struct GmmResult {
  double ln_sigma = 0.0;
  double lambda2 = 0.0;
  double ln_T = 0.0;
  double objective = 0.0;
  int outer_iterations = 0;
  std::string weighting = "identity";
  Regime regime = Regime::indeterminate;
  bool converged = false;         // outer iteration hit the parameter tolerance
  bool objective_monotone = true; // each inner minimization improved on its start
  std::vector<int> lags;          // grid actually used, recorded for provenance
  std::vector<std::string> notes;
};

// Z[k] = ln|increment[k]|; throws on a zero increment (tick adjustment at
// ingestion is responsible for removing those).
std::vector<double> log_abs_series(std::span<const double> increments);

// Empirical covariance of Z at the given lags: global mean, cross products
// over the available pairs, normalized by the full sample size N.
std::vector<double> empirical_log_cov(std::span<const double> z, const std::vector<int>& lags);

// Sufficient statistics of Z for the moment function; computing them once
// makes each objective evaluation O(#lags).
struct LogMomentStats {
  std::size_t n = 0;
  double mean_exp_2z = 0.0;
  std::vector<int> lags;
  std::vector<double> s_cross;  // sum_k Z[k] Z[k-h]
  std::vector<double> s_tail;   // sum_{k>=h} Z[k]
  std::vector<double> s_head;   // sum_{k<n-h} Z[k]
  std::vector<double> f_at_lag; // f_shape(h) cached per lag

  static LogMomentStats from_series(std::span<const double> z, const std::vector<int>& lags);
};

// Moment vector of length #lags + 1: [ mean e^{2Z} - sigma^2 tau,
// model-centered covariance at each lag minus the model covariance ].
// Model covariance uses the smooth in-band form lambda2 (ln T + 3/2
// - ln(h tau) + f(h)); valid for T > (max lag + 1) tau, which holds at the
// optimum in both sampling regimes and keeps the objective smooth in ln T.
std::vector<double> gmm_moment_function(const LogMomentStats& stats, double tau,
                                        const std::array<double, 3>& theta);

GmmResult gmm_estimate(std::span<const double> returns, double tau, const GmmConfig& config = {});

// Classifies an estimated ln T against the finite-sample ceiling ln(span)-3/2:
// inside the band = the estimate is pinned at the ceiling (high frequency),
// clearly below = genuinely resolved integral scale (low frequency), above =
// unreliable.
Regime regime_diagnostic(double ln_T_hat, double span, double band = 1.0);

// Intermittency from the covariance difference at two lags; T_bound is an a
// priori upper bound on the integral scale (both lags must sit below it).
double hf_lambda2(std::span<const double> z, int n, int n_prime, double tau, double T_bound);

// Least-squares variant over a lag set; same identified quantity, smaller
// variance. Slope of R_hat[n] against f(n) - ln(n).
double hf_lambda2_ols(std::span<const double> z, const std::vector<int>& lags, double tau,
                      double T_bound);

struct McInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct McCiResult {
  std::map<std::string, McInterval> intervals;  // keyed ln_sigma / lambda2 / ln_T
  std::map<std::string, std::vector<double>> draws;
  std::size_t n_realizations = 0;
  double level = 0.0;
};

// Monte-Carlo percentile intervals of a named estimator ("gmm" or "hf_ols")
// under the generating spec; reproducible from the master seed.
McCiResult mc_confidence_interval(const SimulationSpec& spec, const std::string& estimator,
                                  std::size_t n_realizations, double level, std::uint64_t seed,
                                  int threads = 0);

}  // namespace mrw
