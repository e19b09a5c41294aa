#include <doctest.h>

#include <cmath>

#include "mrw/approx_stats.hpp"
#include "mrw/kernels.hpp"
#include "mrw/numeric.hpp"

using namespace mrw;

TEST_CASE("log measure increment stats: frozen values and kernel link") {
  ModelParams p{0.02, 200.0, 1.0};
  const auto gm = log_mrm_stats(1.0, 0.0, p);
  CHECK(gm.mean == doctest::Approx(-0.2719327).epsilon(1e-6));
  CHECK(gm.cov == doctest::Approx(0.5438654).epsilon(1e-6));
  // lognormal normalization E[delta M] = tau pins cov(0) = -2 mean
  CHECK(gm.cov == doctest::Approx(-2.0 * gm.mean).epsilon(1e-12));

  for (double h : {0.0, 1.0, 3.0, 150.0}) {
    CHECK(log_mrm_stats(2.0, h, p).cov ==
          doctest::Approx(4.0 * p.lambda2 * omega_increment_cov(2.0, h, p.T)).epsilon(1e-13));
  }
  CHECK(log_mrm_stats(1.0, 0.0, ModelParams{0.0, 200.0, 1.0}).mean == 0.0);
  CHECK_THROWS(log_mrm_stats(0.0, 0.0, p));
}

TEST_CASE("log absolute increment mean: frozen values and shifts") {
  ModelParams p{0.02, 200.0, 1.0};
  CHECK(log_absinc_mean(1.0, p) == doctest::Approx(-0.7711477700616998).epsilon(1e-12));

  // pure gaussian level
  CHECK(log_absinc_mean(1.0, ModelParams{0.0, 200.0, 1.0}) ==
        doctest::Approx(kLogAbsGaussMean).epsilon(1e-14));

  // doubling tau raises the level by exactly lambda2 ln 2 (the Brownian
  // sqrt(tau) term is left to the caller)
  CHECK(log_absinc_mean(2.0, p) - log_absinc_mean(1.0, p) ==
        doctest::Approx(p.lambda2 * std::log(2.0)).epsilon(1e-12));

  // sigma enters additively through ln sigma
  CHECK(log_absinc_mean(1.0, ModelParams{0.02, 200.0, 3.0}) - log_absinc_mean(1.0, p) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("log absolute increment covariance") {
  ModelParams p{0.02, 200.0, 1.0};
  CHECK(log_absinc_cov(1.0, 1.0, p) == doctest::Approx(0.10824046010856291).epsilon(1e-12));
  CHECK(log_absinc_cov(1.0, 0.0, p) ==
        doctest::Approx(kPi * kPi / 8.0 + p.lambda2 * omega_increment_cov(1.0, 0.0, p.T))
            .epsilon(1e-13));
  // the iid ln|eps| noise contributes at lag zero only
  CHECK(log_absinc_cov(1.0, 250.0, p) == 0.0);
  CHECK(log_absinc_cov(1.0, 0.0, ModelParams{0.0, 200.0, 1.0}) ==
        doctest::Approx(kPi * kPi / 8.0).epsilon(1e-14));
  CHECK(log_absinc_cov(1.0, 5.0, ModelParams{0.0, 200.0, 1.0}) == 0.0);
}

TEST_CASE("squared increment covariance") {
  ModelParams p{0.02, 200.0, 1.5};
  const double s4 = std::pow(1.5, 4.0);
  for (double h : {1.0, 7.0}) {
    const double c = omega_increment_cov(1.0, h, p.T);
    CHECK(sq_increment_cov(1.0, h, p) ==
          doctest::Approx(s4 * std::expm1(4.0 * p.lambda2 * c)).epsilon(1e-12));
  }
  const double c0 = omega_increment_cov(1.0, 0.0, p.T);
  CHECK(sq_increment_cov(1.0, 0.0, p) ==
        doctest::Approx(s4 * (3.0 * std::exp(4.0 * p.lambda2 * c0) - 1.0)).epsilon(1e-12));

  // gaussian limit: Var[(sigma sqrt(tau) eps)^2] = 2 sigma^4 tau^2
  ModelParams g{0.0, 200.0, 1.5};
  CHECK(sq_increment_cov(2.0, 0.0, g) == doctest::Approx(2.0 * s4 * 4.0).epsilon(1e-13));
  CHECK(sq_increment_cov(2.0, 4.0, g) == 0.0);

  // beyond the decorrelation radius
  CHECK(sq_increment_cov(1.0, 300.0, p) == 0.0);
}

TEST_CASE("expected empirical log covariance at high frequency") {
  const double l2 = 0.02;

  // r -> 0: approaches lambda2 (ln(L/h) - 3/2) minus the noise-term bias
  const double L = 1e7, h = 2.0;
  CHECK(hf_expected_empirical_cov(h, L, l2) ==
        doctest::Approx(l2 * (std::log(L / h) - 1.5) - kPi * kPi / (8.0 * L)).epsilon(1e-4));

  // h -> L: both the model part and the noise correction vanish
  CHECK(hf_expected_empirical_cov(1024.0 * (1.0 - 1e-9), 1024.0, l2) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-6));

  // decreasing in h
  double prev = hf_expected_empirical_cov(1.0, 1024.0, l2);
  for (double hh : {2.0, 8.0, 64.0, 512.0}) {
    const double v = hf_expected_empirical_cov(hh, 1024.0, l2);
    CHECK(v < prev);
    prev = v;
  }

  // linear in lambda2 up to the lambda-free noise correction
  const double a = hf_expected_empirical_cov(4.0, 1024.0, 0.01);
  const double b = hf_expected_empirical_cov(4.0, 1024.0, 0.02);
  const double noise = -(1.0 - 4.0 / 1024.0) * kPi * kPi / (8.0 * 1024.0);
  CHECK(b - noise == doctest::Approx(2.0 * (a - noise)).epsilon(1e-12));

  CHECK_THROWS(hf_expected_empirical_cov(0.0, 100.0, l2));
  CHECK_THROWS(hf_expected_empirical_cov(100.0, 100.0, l2));
}

TEST_CASE("log increment model bundle") {
  ModelParams p{0.03, 500.0, 2.0};
  LogIncrementModel model(4.0, p);
  CHECK(model.mean() == doctest::Approx(log_absinc_mean(4.0, p)).epsilon(1e-15));
  CHECK(model.cov(8.0) == doctest::Approx(log_absinc_cov(4.0, 8.0, p)).epsilon(1e-15));
  CHECK(model.cov(0.0) == doctest::Approx(log_absinc_cov(4.0, 0.0, p)).epsilon(1e-15));
  CHECK_THROWS(LogIncrementModel(-1.0, p));
}
