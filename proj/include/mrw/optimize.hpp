#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace mrw {

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct SimplexOptions {
  int max_iterations = 600;
  double f_tolerance = 1e-12;  // relative spread of simplex values
  std::vector<double> initial_step;  // per-coordinate; empty = auto
};

// Nelder-Mead with box constraints enforced by clipping every trial point.
// Reflection 1, expansion 2, inside contraction 1/2, shrink 1/2.
inline SimplexResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& fn,
    std::vector<double> x0, const std::vector<std::pair<double, double>>& bounds,
    const SimplexOptions& opt = {}) {
  const size_t n = x0.size();
  auto clip = [&](std::vector<double>& p) {
    for (size_t i = 0; i < n; ++i) p[i] = std::clamp(p[i], bounds[i].first, bounds[i].second);
  };
  clip(x0);

  std::vector<double> step(n);
  for (size_t i = 0; i < n; ++i) {
    double s = (i < opt.initial_step.size() && opt.initial_step[i] > 0.0)
                   ? opt.initial_step[i]
                   : std::max(0.1 * std::abs(x0[i]), 0.05);
    step[i] = s;
  }

  std::vector<std::vector<double>> simplex;
  simplex.push_back(x0);
  for (size_t i = 0; i < n; ++i) {
    auto p = x0;
    p[i] = std::clamp(p[i] + step[i], bounds[i].first, bounds[i].second);
    if (p[i] == x0[i]) p[i] = std::clamp(p[i] - step[i], bounds[i].first, bounds[i].second);
    simplex.push_back(p);
  }

  SimplexResult res;
  std::vector<double> fv(n + 1);
  for (size_t i = 0; i <= n; ++i) {
    fv[i] = fn(simplex[i]);
    ++res.evaluations;
  }

  std::vector<size_t> order(n + 1);
  for (int it = 0; it < opt.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> s2(n + 1);
      std::vector<double> f2(n + 1);
      for (size_t i = 0; i <= n; ++i) {
        s2[i] = simplex[order[i]];
        f2[i] = fv[order[i]];
      }
      simplex.swap(s2);
      fv.swap(f2);
    }
    if (fv[n] - fv[0] < opt.f_tolerance * (1.0 + std::abs(fv[0]))) {
      res.converged = true;
      break;
    }

    std::vector<double> cen(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) cen[j] += simplex[i][j];
    }
    for (size_t j = 0; j < n; ++j) cen[j] /= static_cast<double>(n);

    auto xr = cen;
    for (size_t j = 0; j < n; ++j) xr[j] = cen[j] + (cen[j] - simplex[n][j]);
    clip(xr);
    double fr = fn(xr);
    ++res.evaluations;

    if (fr < fv[0]) {
      auto xe = cen;
      for (size_t j = 0; j < n; ++j) xe[j] = cen[j] + 2.0 * (cen[j] - simplex[n][j]);
      clip(xe);
      double fe = fn(xe);
      ++res.evaluations;
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      auto xc = cen;
      for (size_t j = 0; j < n; ++j) xc[j] = cen[j] + 0.5 * (simplex[n][j] - cen[j]);
      clip(xc);
      double fc = fn(xc);
      ++res.evaluations;
      if (fc < fv[n]) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (size_t i = 1; i <= n; ++i) {
          for (size_t j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          fv[i] = fn(simplex[i]);
          ++res.evaluations;
        }
      }
    }
  }

  size_t best = 0;
  for (size_t i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  res.x = simplex[best];
  res.value = fv[best];
  return res;
}

}  // namespace mrw
