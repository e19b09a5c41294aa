#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrw/approx_stats.hpp"
#include "mrw/estimate.hpp"
#include "mrw/forecast.hpp"
#include "mrw/io.hpp"
#include "mrw/kernels.hpp"
#include "mrw/params.hpp"
#include "mrw/risk.hpp"
#include "mrw/run_config.hpp"
#include "mrw/simulate.hpp"
#include "mrw/threading.hpp"
#include "mrw/version.hpp"

namespace {

using nlohmann::json;

json model_json(const mrw::ModelParams& p) {
  return json{{"lambda2", p.lambda2}, {"T", p.T}, {"sigma", p.sigma}};
}

void write_json(const std::string& path, const json& doc) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

// pulls the requested column; single-column tables need no name
std::vector<double> load_series(const std::string& path, const std::string& column) {
  auto table = mrw::read_csv(path);
  if (!column.empty()) return table.column(column);
  if (table.columns.size() == 1) return table.columns[0];
  for (const auto& name : {"value", "return", "close"}) {
    for (std::size_t i = 0; i < table.header.size(); ++i)
      if (table.header[i] == name) return table.columns[i];
  }
  throw std::invalid_argument(path + ": ambiguous columns, pass --column");
}

struct SimArgs {
  mrw::SimulationSpec spec;
  std::string process = "mrw";
  std::string sampler = "circulant";
  std::size_t paths = 1;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  std::string binary_out;
};

json sim_config_json(const SimArgs& a) {
  return json{{"command", "simulate"},
              {"version", mrw::kVersion},
              {"model", model_json(a.spec.params)},
              {"tau", a.spec.tau},
              {"n", a.spec.n},
              {"l_ratio", a.spec.l_ratio},
              {"process", a.process},
              {"sampler", a.sampler},
              {"paths", a.paths},
              {"seed", a.seed}};
}

int run_simulate(const SimArgs& a) {
  mrw::SimulationSpec spec = a.spec;
  spec.sampler = a.sampler == "cholesky" ? mrw::SamplerKind::cholesky
                                         : mrw::SamplerKind::circulant;
  spec.validate();
  const json config = sim_config_json(a);

  if (a.paths == 1) {
    mrw::SampledPath path;
    if (a.process == "omega") path = mrw::simulate_omega(spec, a.seed);
    else if (a.process == "mrm") path = mrw::simulate_mrm(spec, a.seed);
    else path = mrw::simulate_mrw(spec, a.seed);

    // increments stamp the right edge of their interval; omega samples sit on the grid
    const double t0 = a.process == "omega" ? 0.0 : path.dt;
    std::vector<double> t(path.values.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = t0 + i * path.dt;
    mrw::write_csv(a.out, config.dump(), {"t", "value"}, {t, path.values});
    if (!a.binary_out.empty()) {
      mrw::BinaryPath bin{mrw::path_kind_from_string(a.process), path.dt, a.seed,
                          path.values};
      mrw::write_path_binary(a.binary_out, bin);
    }
    return 0;
  }

  if (!a.binary_out.empty())
    throw std::invalid_argument("--binary-out supports a single path only");
  const mrw::Process proc =
      a.process == "mrm" ? mrw::Process::mrm : mrw::Process::mrw;
  if (a.process == "omega")
    throw std::invalid_argument("ensemble output supports mrm/mrw increments only");
  std::vector<std::vector<double>> cols(a.paths + 1);
  mrw::simulate_ensemble(spec, proc, a.seed, a.paths,
                         [&](std::size_t i, std::vector<double>&& v) {
                           cols[i + 1] = std::move(v);
                         },
                         static_cast<unsigned>(a.threads));
  cols[0].resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) cols[0][i] = (i + 1) * spec.tau;
  std::vector<std::string> header(a.paths + 1);
  header[0] = "t";
  for (std::size_t i = 0; i < a.paths; ++i) header[i + 1] = "path_" + std::to_string(i);
  mrw::write_csv(a.out, config.dump(), header, cols);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"log-normal cascade toolkit: simulation, estimation, forecasting, risk"};
  app.require_subcommand(1);

  // ---- simulate ----
  SimArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "sample magnitude/measure/walk paths");
  c_sim->add_option("--lambda2", sim.spec.params.lambda2, "intermittency coefficient");
  c_sim->add_option("--T", sim.spec.params.T, "integral scale");
  c_sim->add_option("--sigma", sim.spec.params.sigma, "diffusive scale");
  c_sim->add_option("--tau", sim.spec.tau, "sampling period");
  c_sim->add_option("--n", sim.spec.n, "number of coarse increments");
  c_sim->add_option("--l-ratio", sim.spec.l_ratio, "fine cells per tau (cutoff l = tau/ratio)");
  c_sim->add_option("--process", sim.process, "omega|mrm|mrw")
      ->check(CLI::IsMember({"omega", "mrm", "mrw"}));
  c_sim->add_option("--sampler", sim.sampler, "circulant|cholesky")
      ->check(CLI::IsMember({"circulant", "cholesky"}));
  c_sim->add_option("--paths", sim.paths, "ensemble size");
  c_sim->add_option("--seed", sim.seed, "master seed")->required();
  c_sim->add_option("--threads", sim.threads, "worker threads (0 = auto)");
  c_sim->add_option("--out", sim.out, "output CSV")->required();
  c_sim->add_option("--binary-out", sim.binary_out, "optional binary dump (single path)");

  // ---- estimate ----
  struct {
    std::string input, column, format = "returns", out;
    double tick_size = 0.01, tau = 1.0, regime_band = 1.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<int> lags;
    int max_outer = 10;
  } est;
  auto* c_est = app.add_subcommand("estimate", "GMM fit of (ln sigma, lambda2, ln T)");
  c_est->add_option("--input", est.input, "CSV of returns or prices")->required();
  c_est->add_option("--column", est.column, "column name (default: auto)");
  c_est->add_option("--format", est.format, "returns|prices")
      ->check(CLI::IsMember({"returns", "prices"}));
  c_est->add_option("--tick-size", est.tick_size, "tick size for price adjustment");
  auto* est_seed = c_est->add_option("--seed", est.seed, "seed for the tick adjustment");
  c_est->add_option("--tau", est.tau, "sampling period of the series");
  c_est->add_option("--lags", est.lags, "covariance lags (default: 43 log-spaced in [1,150])");
  c_est->add_option("--regime-band", est.regime_band, "half-width of the ceiling band");
  c_est->add_option("--max-outer", est.max_outer, "outer weighting iterations");
  c_est->add_option("--out", est.out, "result JSON path (default stdout)");

  // ---- hf-lambda2 ----
  struct {
    std::string input, column, out;
    double tau = 1.0, t_bound = 0.0;
    int n = 2, nprime = 16;
    std::vector<int> lagset;
  } hf;
  auto* c_hf = app.add_subcommand("hf-lambda2", "high-frequency lambda2 regression estimator");
  c_hf->add_option("--input", hf.input, "CSV of returns")->required();
  c_hf->add_option("--column", hf.column, "column name (default: auto)");
  c_hf->add_option("--tau", hf.tau, "sampling period");
  c_hf->add_option("--n", hf.n, "first lag");
  c_hf->add_option("--nprime", hf.nprime, "second lag");
  c_hf->add_option("--lagset", hf.lagset, "lag set for the least-squares variant");
  c_hf->add_option("--T-bound", hf.t_bound, "a-priori bound on the integral scale (default: span)");
  c_hf->add_option("--out", hf.out, "result JSON path (default stdout)");

  // ---- forecast ----
  struct {
    std::string input, column, kind = "log", out;
    mrw::ModelParams params;
    double tau = 1.0, ridge = 1e-8;
    int scale = 1, horizon = 0, window = 512;
  } fc;
  auto* c_fc = app.add_subcommand("forecast", "rolling linear volatility forecasts");
  c_fc->add_option("--input", fc.input, "CSV of returns")->required();
  c_fc->add_option("--column", fc.column, "column name (default: auto)");
  c_fc->add_option("--kind", fc.kind, "lin|sq|log")->check(CLI::IsMember({"lin", "sq", "log"}));
  c_fc->add_option("--lambda2", fc.params.lambda2, "intermittency coefficient");
  c_fc->add_option("--T", fc.params.T, "integral scale");
  c_fc->add_option("--sigma", fc.params.sigma, "diffusive scale");
  c_fc->add_option("--tau", fc.tau, "sampling period");
  c_fc->add_option("--scale", fc.scale, "target scale in tau steps");
  c_fc->add_option("--horizon", fc.horizon, "forecast horizon in tau steps");
  c_fc->add_option("--window", fc.window, "conditioning window length");
  c_fc->add_option("--ridge", fc.ridge, "relative Gram ridge");
  c_fc->add_option("--out", fc.out, "output CSV")->required();

  // ---- var-backtest ----
  struct {
    std::string input, column, out_prefix;
    mrw::ModelParams params;
    double tau = 1.0, level = 0.95;
    std::vector<double> p{0.01, 0.05};
    int scale = 1, horizon = 0, window = 512;
  } vb;
  auto* c_vb = app.add_subcommand("var-backtest", "rolling VaR with coverage backtests");
  c_vb->add_option("--input", vb.input, "CSV of returns")->required();
  c_vb->add_option("--column", vb.column, "column name (default: auto)");
  c_vb->add_option("--lambda2", vb.params.lambda2, "intermittency coefficient");
  c_vb->add_option("--T", vb.params.T, "integral scale");
  c_vb->add_option("--sigma", vb.params.sigma, "diffusive scale");
  c_vb->add_option("--tau", vb.tau, "sampling period");
  c_vb->add_option("--p", vb.p, "VaR levels (repeatable)");
  c_vb->add_option("--scale", vb.scale, "target scale in tau steps");
  c_vb->add_option("--horizon", vb.horizon, "forecast horizon in tau steps");
  c_vb->add_option("--window", vb.window, "conditioning window length");
  c_vb->add_option("--level", vb.level, "test confidence level");
  c_vb->add_option("--out-prefix", vb.out_prefix, "writes <prefix>.json and <prefix>.csv")
      ->required();

  // ---- cov-table ----
  struct {
    mrw::ModelParams params;
    double tau = 1.0;
    int hmax = 150;
    std::string out;
  } ct;
  auto* c_ct = app.add_subcommand("cov-table", "model log-magnitude covariance table");
  c_ct->add_option("--lambda2", ct.params.lambda2, "intermittency coefficient");
  c_ct->add_option("--T", ct.params.T, "integral scale");
  c_ct->add_option("--sigma", ct.params.sigma, "diffusive scale");
  c_ct->add_option("--tau", ct.tau, "sampling period");
  c_ct->add_option("--hmax", ct.hmax, "largest lag in tau steps");
  c_ct->add_option("--out", ct.out, "output CSV")->required();

  // ---- mc-ci ----
  struct {
    mrw::SimulationSpec spec;
    std::string estimator = "gmm", out;
    std::size_t realizations = 1000;
    double level = 0.95;
    std::uint64_t seed = 0;
    int threads = 0;
  } mc;
  auto* c_mc = app.add_subcommand("mc-ci", "Monte-Carlo estimator confidence intervals");
  c_mc->add_option("--lambda2", mc.spec.params.lambda2, "intermittency coefficient");
  c_mc->add_option("--T", mc.spec.params.T, "integral scale");
  c_mc->add_option("--sigma", mc.spec.params.sigma, "diffusive scale");
  c_mc->add_option("--tau", mc.spec.tau, "sampling period");
  c_mc->add_option("--n", mc.spec.n, "series length per realization");
  c_mc->add_option("--l-ratio", mc.spec.l_ratio, "fine cells per tau");
  c_mc->add_option("--estimator", mc.estimator, "gmm|hf_ols")
      ->check(CLI::IsMember({"gmm", "hf_ols"}));
  c_mc->add_option("--realizations", mc.realizations, "ensemble size");
  c_mc->add_option("--level", mc.level, "interval level");
  c_mc->add_option("--seed", mc.seed, "master seed")->required();
  c_mc->add_option("--threads", mc.threads, "worker threads (0 = auto)");
  c_mc->add_option("--out", mc.out, "result JSON path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_sim->parsed()) return run_simulate(sim);

    if (c_est->parsed()) {
      est.seed_set = est_seed->count() > 0;
      std::vector<double> returns;
      json source{{"input", est.input}, {"format", est.format}};
      if (est.format == "prices") {
        if (!est.seed_set)
          throw std::invalid_argument("--seed is required for price ingestion (tick rule)");
        auto prices = mrw::read_price_csv(est.input, est.tick_size);
        returns = mrw::ingest_prices(prices, est.seed);
        source["tick_size"] = est.tick_size;
        source["seed"] = est.seed;
      } else {
        returns = load_series(est.input, est.column);
      }
      mrw::GmmConfig cfg;
      if (!est.lags.empty()) cfg.lags = est.lags;
      cfg.max_outer_iterations = est.max_outer;
      cfg.regime_band = est.regime_band;
      auto fit = mrw::gmm_estimate(returns, est.tau, cfg);
      json doc{{"command", "estimate"},
               {"version", mrw::kVersion},
               {"config",
                {{"source", source},
                 {"tau", est.tau},
                 {"lags", fit.lags},
                 {"regime_band", est.regime_band},
                 {"max_outer_iterations", est.max_outer}}},
               {"result",
                {{"ln_sigma", fit.ln_sigma},
                 {"sigma", std::exp(fit.ln_sigma)},
                 {"lambda2", fit.lambda2},
                 {"ln_T", fit.ln_T},
                 {"T", std::exp(fit.ln_T)},
                 {"objective", fit.objective},
                 {"outer_iterations", fit.outer_iterations},
                 {"weighting", fit.weighting},
                 {"converged", fit.converged},
                 {"objective_monotone", fit.objective_monotone},
                 {"regime", mrw::to_string(fit.regime)},
                 {"notes", fit.notes}}}};
      write_json(est.out, doc);
      return 0;
    }

    if (c_hf->parsed()) {
      auto returns = load_series(hf.input, hf.column);
      auto z = mrw::log_abs_series(returns);
      const double t_bound =
          hf.t_bound > 0.0 ? hf.t_bound : static_cast<double>(z.size()) * hf.tau;
      json result{{"lambda2_two_lag", mrw::hf_lambda2(z, hf.n, hf.nprime, hf.tau, t_bound)}};
      if (!hf.lagset.empty())
        result["lambda2_ols"] = mrw::hf_lambda2_ols(z, hf.lagset, hf.tau, t_bound);
      json doc{{"command", "hf-lambda2"},
               {"version", mrw::kVersion},
               {"config",
                {{"input", hf.input},
                 {"tau", hf.tau},
                 {"n", hf.n},
                 {"nprime", hf.nprime},
                 {"lagset", hf.lagset},
                 {"T_bound", t_bound}}},
               {"result", result}};
      write_json(hf.out, doc);
      return 0;
    }

    if (c_fc->parsed()) {
      auto returns = load_series(fc.input, fc.column);
      mrw::PredictorSpec spec;
      spec.kind = mrw::predictor_kind_from_string(fc.kind);
      spec.params = fc.params;
      spec.tau = fc.tau;
      spec.scale_steps = fc.scale;
      spec.horizon_steps = fc.horizon;
      spec.window = fc.window;
      spec.ridge = fc.ridge;
      auto predictor = mrw::build_predictor(spec);
      auto fs = mrw::forecast_series(returns, predictor);
      auto realized = mrw::realized_targets(returns, spec);

      json config{{"command", "forecast"},
                  {"version", mrw::kVersion},
                  {"model", model_json(fc.params)},
                  {"kind", fc.kind},
                  {"tau", fc.tau},
                  {"scale_steps", fc.scale},
                  {"horizon_steps", fc.horizon},
                  {"window", fc.window},
                  {"ridge", fc.ridge},
                  {"input", fc.input}};
      std::vector<double> t(fs.prediction.size());
      for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = static_cast<double>(fs.first_target + i) * fc.tau;
      std::vector<std::string> header{"t", "prediction", "realized"};
      std::vector<std::vector<double>> cols{t, fs.prediction, realized};
      if (!fs.level.empty()) {
        header.push_back("level");
        cols.push_back(fs.level);
      }
      mrw::write_csv(fc.out, config.dump(), header, cols);
      json doc{{"command", "forecast"},
               {"version", mrw::kVersion},
               {"config", config},
               {"result",
                {{"mse", mrw::evaluate_forecasts(fs.prediction, realized, mrw::ErrorMetric::mse)},
                 {"mae", mrw::evaluate_forecasts(fs.prediction, realized, mrw::ErrorMetric::mae)},
                 {"prediction_variance", predictor.prediction_variance},
                 {"target_mean", predictor.target_mean},
                 {"target_variance", predictor.target_variance},
                 {"forecasts", fs.prediction.size()}}}};
      std::cout << doc.dump(2) << "\n";
      return 0;
    }

    if (c_vb->parsed()) {
      auto returns = load_series(vb.input, vb.column);
      json config{{"command", "var-backtest"},
                  {"version", mrw::kVersion},
                  {"model", model_json(vb.params)},
                  {"tau", vb.tau},
                  {"p", vb.p},
                  {"scale_steps", vb.scale},
                  {"horizon_steps", vb.horizon},
                  {"window", vb.window},
                  {"level", vb.level},
                  {"input", vb.input}};
      json reports = json::array();
      std::vector<std::vector<double>> summary(8);
      for (double p : vb.p) {
        auto rep = mrw::run_var_backtest(returns, vb.params, vb.tau, p, vb.scale, vb.horizon,
                                         vb.window, vb.level);
        const double rate =
            static_cast<double>(rep.kupiec.violations) / static_cast<double>(rep.n_obs);
        reports.push_back(
            {{"p", p},
             {"n_obs", rep.n_obs},
             {"violations", rep.kupiec.violations},
             {"rate", rate},
             {"kupiec", {{"stat", rep.kupiec.stat}, {"pass", rep.kupiec.pass}}},
             {"christoffersen",
              {{"stat", rep.christoffersen.stat},
               {"pass", rep.christoffersen.pass},
               {"kupiec_fallback", rep.christoffersen.kupiec_fallback}}}});
        summary[0].push_back(p);
        summary[1].push_back(static_cast<double>(rep.n_obs));
        summary[2].push_back(static_cast<double>(rep.kupiec.violations));
        summary[3].push_back(rate);
        summary[4].push_back(rep.kupiec.stat);
        summary[5].push_back(rep.kupiec.pass ? 1.0 : 0.0);
        summary[6].push_back(rep.christoffersen.stat);
        summary[7].push_back(rep.christoffersen.pass ? 1.0 : 0.0);
      }
      write_json(vb.out_prefix + ".json",
                 json{{"command", "var-backtest"},
                      {"version", mrw::kVersion},
                      {"config", config},
                      {"reports", reports}});
      mrw::write_csv(vb.out_prefix + ".csv", config.dump(),
                     {"p", "n_obs", "violations", "rate", "kupiec_stat", "kupiec_pass",
                      "christoffersen_stat", "christoffersen_pass"},
                     summary);
      return 0;
    }

    if (c_ct->parsed()) {
      ct.params.validate();
      json config{{"command", "cov-table"}, {"version", mrw::kVersion},
                  {"model", model_json(ct.params)}, {"tau", ct.tau}, {"hmax", ct.hmax}};
      std::vector<double> h(ct.hmax + 1), model(ct.hmax + 1), leading(ct.hmax + 1);
      for (int k = 0; k <= ct.hmax; ++k) {
        h[k] = k;
        model[k] = mrw::log_absinc_cov(ct.tau, k * ct.tau, ct.params);
        leading[k] = k == 0 ? model[k]
                            : ct.params.lambda2 * std::log(ct.params.T / (k * ct.tau));
      }
      mrw::write_csv(ct.out, config.dump(), {"h", "model_cov", "leading_cov"},
                     {h, model, leading});
      return 0;
    }

    if (c_mc->parsed()) {
      auto ci = mrw::mc_confidence_interval(mc.spec, mc.estimator, mc.realizations, mc.level,
                                            mc.seed, mc.threads);
      json intervals = json::object();
      for (const auto& [name, iv] : ci.intervals)
        intervals[name] = {{"lo", iv.lo}, {"hi", iv.hi}};
      json doc{{"command", "mc-ci"},
               {"version", mrw::kVersion},
               {"config",
                {{"model", model_json(mc.spec.params)},
                 {"tau", mc.spec.tau},
                 {"n", mc.spec.n},
                 {"l_ratio", mc.spec.l_ratio},
                 {"estimator", mc.estimator},
                 {"realizations", mc.realizations},
                 {"level", mc.level},
                 {"seed", mc.seed}}},
               {"result", {{"intervals", intervals}}}};
      write_json(mc.out, doc);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cout << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
