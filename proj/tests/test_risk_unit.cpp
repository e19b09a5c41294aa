#include <doctest.h>

#include <cmath>
#include <vector>

#include "mrw/approx_stats.hpp"
#include "mrw/kernels.hpp"
#include "mrw/numeric.hpp"
#include "mrw/risk.hpp"

using namespace mrw;

TEST_CASE("coverage test: frozen likelihood ratios") {
  std::vector<int> none(1000, 0);
  const auto k0 = kupiec_test(none, 0.05);
  CHECK(k0.stat == doctest::Approx(102.58658877510116).epsilon(1e-12));
  CHECK(k0.critical == doctest::Approx(3.8414588206941254).epsilon(1e-12));
  CHECK_FALSE(k0.pass);
  CHECK(k0.violations == 0);
  CHECK(k0.n_obs == 1000);

  // empirical rate equal to the target minimizes the ratio
  std::vector<int> exact(1000, 0);
  for (int i = 0; i < 50; ++i) exact[i * 20] = 1;
  const auto k1 = kupiec_test(exact, 0.05);
  CHECK(k1.stat == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(k1.pass);
  CHECK(k1.violations == 50);

  CHECK_THROWS(kupiec_test(std::vector<int>{}, 0.05));
}

TEST_CASE("conditional coverage test: frozen value and fallback") {
  const std::vector<int> v{0, 0, 1, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1};
  const auto c = christoffersen_test(v, 0.05);
  CHECK(c.n00 == 11);
  CHECK(c.n01 == 4);
  CHECK(c.n10 == 3);
  CHECK(c.n11 == 1);
  CHECK(c.coverage_stat == doctest::Approx(9.002715782414093).epsilon(1e-12));
  CHECK(c.independence_stat == doctest::Approx(0.004560555262997923).epsilon(1e-9));
  CHECK(c.stat == doctest::Approx(9.00727633767709).epsilon(1e-12));
  CHECK(c.critical == doctest::Approx(5.991464547107979).epsilon(1e-12));
  CHECK_FALSE(c.pass);
  CHECK_FALSE(c.kupiec_fallback);

  // no violations: the transition table degenerates, coverage-only fallback
  const std::vector<int> quiet(20, 0);
  const auto f = christoffersen_test(quiet, 0.05);
  CHECK(f.kupiec_fallback);
  CHECK(f.stat == doctest::Approx(kupiec_test(quiet, 0.05).stat).epsilon(1e-12));
  CHECK(f.critical == doctest::Approx(3.8414588206941254).epsilon(1e-12));
  CHECK(f.pass);  // -2*20*ln(0.95) = 2.05 < 3.84

  // all violations: the other row is empty
  const std::vector<int> loud(30, 1);
  CHECK(christoffersen_test(loud, 0.05).kupiec_fallback);
}

TEST_CASE("value-at-risk threshold: closed form, frozen quadrature, symmetry") {
  // degenerate magnitude: VaR = -sigma sqrt(s) e^m qnorm(p)
  ConditionalMagnitudeLaw point{0.2, 0.0};
  CHECK(var_forecast(point, 0.01, 1.0, 1.0) ==
        doctest::Approx(2.8414077097935304).epsilon(1e-12));

  ConditionalMagnitudeLaw law{0.1, 0.3};
  CHECK(var_forecast(law, 0.05, 1.0, 1.0) == doctest::Approx(2.2985076906762956).epsilon(1e-9));
  ConditionalMagnitudeLaw law2{-0.05, 0.1};
  CHECK(var_forecast(law2, 0.01, 1.0, 1.0) == doctest::Approx(2.6853528602327246).epsilon(1e-9));

  // median of the symmetric return law
  CHECK(var_forecast(law, 0.5, 1.0, 1.0) == 0.0);

  // upper tail only on explicit request, with the symmetric value
  CHECK_THROWS(var_forecast(law, 0.8, 1.0, 1.0));
  CHECK(var_forecast(law, 0.8, 1.0, 1.0, true) ==
        doctest::Approx(-var_forecast(law, 0.2, 1.0, 1.0)).epsilon(1e-12));

  CHECK_THROWS(var_forecast(law, 0.0, 1.0, 1.0));
  CHECK_THROWS(var_forecast(law, 1.0, 1.0, 1.0, true));
  CHECK_THROWS(var_forecast(law, 0.05, -1.0, 1.0));
}

TEST_CASE("value-at-risk: monotonicity grid and scale equivariance") {
  const double grid_m[] = {-0.3, 0.0, 0.25};
  const double grid_v[] = {0.0, 0.05, 0.2, 0.5};
  const double grid_p[] = {0.01, 0.025, 0.05, 0.1, 0.25};

  for (double m : grid_m) {
    for (double v : grid_v) {
      double prev = std::numeric_limits<double>::infinity();
      for (double p : grid_p) {  // strictly decreasing in p
        const double var = var_forecast({m, v}, p, 1.0, 1.0);
        CHECK(var < prev);
        CHECK(var > 0.0);
        prev = var;
      }
    }
  }
  for (double p : grid_p) {
    for (double v : grid_v) {  // strictly increasing in m
      double prev = -1.0;
      for (double m : grid_m) {
        const double var = var_forecast({m, v}, p, 1.0, 1.0);
        CHECK(var > prev);
        prev = var;
      }
    }
    // magnitude variance fattens the tail only where |z_p| > 1; central
    // quantiles (p = 0.25) contract as the scale mixture gets peakier
    if (p <= 0.1) {
      for (double m : grid_m) {
        double prev = -1.0;
        for (double v : grid_v) {
          const double var = var_forecast({m, v}, p, 1.0, 1.0);
          CHECK(var > prev);
          prev = var;
        }
      }
    }
  }

  // VaR(sigma, s) = sigma sqrt(s) VaR(1, 1)
  const ConditionalMagnitudeLaw law{0.07, 0.25};
  const double base = var_forecast(law, 0.05, 1.0, 1.0);
  CHECK(var_forecast(law, 0.05, 2.0, 1.0) == doctest::Approx(2.0 * base).epsilon(1e-12));
  CHECK(var_forecast(law, 0.05, 1.0, 4.0) == doctest::Approx(2.0 * base).epsilon(1e-12));
  CHECK(var_forecast(law, 0.05, 3.0, 9.0) == doctest::Approx(9.0 * base).epsilon(1e-12));
}

TEST_CASE("conditional magnitude law: centering and variance reduction") {
  ModelParams p{0.02, 200.0, 1.0};
  const int window = 64;
  const auto predictor = build_magnitude_predictor(p, 1.0, 1, 0, window);

  REQUIRE(predictor.weights.size() == window);
  const double v_s = p.lambda2 * omega_increment_cov(1.0, 0.0, p.T);
  CHECK(predictor.unconditional_variance == doctest::Approx(v_s).epsilon(1e-12));
  CHECK(predictor.conditional_variance <= v_s);
  CHECK(predictor.conditional_variance >= 0.0);
  CHECK(predictor.z_mean ==
        doctest::Approx(log_absinc_mean(1.0, p) + 0.5 * std::log(1.0)).epsilon(1e-12));

  // a window sitting exactly at the model mean recovers the unconditional law
  std::vector<double> flat(window, predictor.z_mean);
  const auto law = conditional_magnitude_law(flat, predictor);
  CHECK(law.mean == doctest::Approx(-v_s).epsilon(1e-12));
  CHECK(law.variance == doctest::Approx(predictor.conditional_variance).epsilon(1e-15));

  // louder-than-average recent magnitudes push the conditional mean up
  std::vector<double> loud(window, predictor.z_mean + 1.0);
  CHECK(conditional_magnitude_law(loud, predictor).mean > law.mean);

  // convenience overload agrees
  const auto law2 = conditional_magnitude_law(flat, p, 1.0, 1, 0, window);
  CHECK(law2.mean == doctest::Approx(law.mean).epsilon(1e-13));

  CHECK_THROWS(conditional_magnitude_law(std::vector<double>(window - 1, 0.0), predictor));
}

TEST_CASE("rolling backtest input validation") {
  ModelParams p{0.02, 200.0, 1.0};
  CHECK_THROWS(run_var_backtest(std::vector<double>(10, 0.01), p, 1.0, 0.05, 1, 0, 64));
  std::vector<double> with_zero(70, 0.01);
  with_zero[40] = 0.0;
  CHECK_THROWS(run_var_backtest(with_zero, p, 1.0, 0.05, 1, 0, 64));
}
