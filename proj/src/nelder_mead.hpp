#pragma once

// Budgeted Nelder-Mead with dimension-adaptive coefficients (Gao & Han).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace equipart::detail {

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t evals = 0;
  bool converged = false;
};

// Minimizes f from x0 with an axis-aligned initial simplex of edge `step`.
// Stops when the budget is spent, f <= f_target, or the simplex collapses.
template <class F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& x0, double step, std::size_t budget,
                             double f_target = -HUGE_VAL, double f_tol = 1e-15, double x_tol = 1e-12) {
  const std::size_t n = x0.size();
  NelderMeadResult out{x0, 0.0, 0, false};
  if (budget == 0) {
    return out;
  }
  const double dn = static_cast<double>(std::max<std::size_t>(n, 1));
  const double alpha = 1.0;
  const double gamma = 1.0 + 2.0 / dn;
  const double rho = 0.75 - 1.0 / (2.0 * dn);
  const double sigma = 1.0 - 1.0 / dn;

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  auto eval = [&](const std::vector<double>& x) {
    ++out.evals;
    return f(x);
  };
  fv[0] = eval(simplex[0]);
  for (std::size_t i = 1; i <= n && out.evals < budget; ++i) {
    simplex[i][i - 1] += step;
    fv[i] = eval(simplex[i]);
  }
  if (out.evals < n + 1) {
    // Budget ran out while building the simplex.
    const std::size_t best =
        static_cast<std::size_t>(std::min_element(fv.begin(), fv.begin() + static_cast<std::ptrdiff_t>(out.evals)) -
                                 fv.begin());
    out.x = simplex[best];
    out.f = fv[best];
    return out;
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];
    out.x = simplex[best];
    out.f = fv[best];
    if (fv[best] <= f_target || out.evals >= budget) {
      return out;
    }
    double diam = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        diam = std::max(diam, std::abs(simplex[i][j] - simplex[best][j]));
      }
    }
    if (fv[worst] - fv[best] <= f_tol * (1.0 + std::abs(fv[best])) || diam <= x_tol) {
      out.converged = true;
      return out;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / dn;
    }
    for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - simplex[worst][j]);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      if (out.evals >= budget) {
        simplex[worst] = xr;
        fv[worst] = fr;
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    if (out.evals >= budget) continue;
    const bool outside = fr < fv[worst];
    for (std::size_t j = 0; j < n; ++j) {
      xc[j] = outside ? centroid[j] + rho * (xr[j] - centroid[j]) : centroid[j] + rho * (simplex[worst][j] - centroid[j]);
    }
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= n && out.evals < budget; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) {
        simplex[i][j] = simplex[best][j] + sigma * (simplex[i][j] - simplex[best][j]);
      }
      fv[i] = eval(simplex[i]);
    }
  }
}

}  // namespace equipart::detail
