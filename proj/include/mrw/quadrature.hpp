#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mrw/numeric.hpp"

namespace mrw {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // achieved absolute error estimate
  bool converged = true;
};

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline void adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth,
                          QuadResult& out) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double err = (left + right - whole) / 15.0;
  if (depth <= 0) {
    out.value += left + right + err;
    out.error += std::abs(err);
    if (std::abs(err) > tol) out.converged = false;
    return;
  }
  if (std::abs(err) <= tol) {
    out.value += left + right + err;  // Richardson correction
    out.error += std::abs(err);
    return;
  }
  adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, out);
  adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

// Adaptive Simpson with Richardson correction. abs_tol is the target absolute
// error for the whole interval; depth bounds the recursion.
inline QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                     double abs_tol = 1e-10, int depth = 48) {
  QuadResult out;
  if (a == b) return out;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = detail::simpson(a, b, fa, fm, fb);
  detail::adaptive_step(f, a, b, fa, fm, fb, whole, abs_tol, depth, out);
  return out;
}

// Same, but the integrand is split at the given interior points first (known
// kinks or integrable singularities). Points outside (a,b) are ignored.
inline QuadResult integrate_adaptive_split(const std::function<double(double)>& f, double a,
                                           double b, std::vector<double> pts,
                                           double abs_tol = 1e-10, int depth = 48) {
  pts.push_back(a);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  QuadResult out;
  double prev = a;
  for (double p : pts) {
    if (p <= prev || p > b) continue;
    const QuadResult piece = integrate_adaptive(f, prev, p, abs_tol, depth);
    out.value += piece.value;
    out.error += piece.error;
    out.converged = out.converged && piece.converged;
    prev = p;
  }
  return out;
}

// Gauss-Hermite rule for int f(x) e^{-x^2} dx: Newton iteration on the
// recurrence (Numerical-Recipes style), accurate to ~1e-14 for n <= 128.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussHermite gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n >= 1");
  GaussHermite gh;
  gh.nodes.resize(n);
  gh.weights.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * gh.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * gh.nodes[1];
    } else {
      z = 2.0 * z - gh.nodes[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    gh.nodes[i] = z;
    gh.nodes[n - 1 - i] = -z;
    gh.weights[i] = 2.0 / (pp * pp);
    gh.weights[n - 1 - i] = gh.weights[i];
  }
  if (n % 2 == 1) gh.nodes[n / 2] = 0.0;
  return gh;
}

// E[f(G)] for G ~ N(mean, var) using a Gauss-Hermite rule.
inline double gauss_hermite_mean(const GaussHermite& gh, double mean, double var,
                                 const std::function<double(double)>& f) {
  if (var < 0.0) throw std::invalid_argument("gauss_hermite_mean: negative variance");
  if (var == 0.0) return f(mean);
  const double s = std::sqrt(2.0 * var);
  double acc = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    acc += gh.weights[i] * f(mean + s * gh.nodes[i]);
  }
  return acc / std::sqrt(kPi);
}

// Monotone-decreasing root find on (0, inf): returns x with f(x) = 0 given
// f decreasing, f(0+) > 0 > f(inf). Bisection after geometric bracketing.
inline double solve_decreasing(const std::function<double(double)>& f, double x0,
                               double rel_tol = 1e-10, int max_iter = 200) {
  double lo = x0, hi = x0;
  double flo = f(lo);
  int guard = 0;
  while (flo < 0.0) {
    lo *= 0.5;
    flo = f(lo);
    if (++guard > 200) throw std::runtime_error("solve_decreasing: no lower bracket");
  }
  guard = 0;
  double fhi = f(hi);
  while (fhi > 0.0) {
    hi *= 2.0;
    fhi = f(hi);
    if (++guard > 200) throw std::runtime_error("solve_decreasing: no upper bracket");
  }
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm > 0.0) lo = mid; else hi = mid;
    if (hi - lo <= rel_tol * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace mrw
