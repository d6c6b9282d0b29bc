#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "equipart/error.hpp"
#include "equipart/solver.hpp"

namespace equipart {

namespace {

constexpr double kMassSlack = 1e-12;

struct Window {
  double lo = 0.0;  // shares of {x >= a} are constant for a in (lo, hi]
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
};

Window median_window(const std::vector<double>& proj, const std::vector<double>& w) {
  Window out;
  out.lo = weighted_quantile(proj, w, 0.5);
  out.hi = HUGE_VAL;
  for (double x : proj) {
    if (x > out.lo) out.hi = std::min(out.hi, x);
  }
  if (!std::isfinite(out.hi)) out.hi = out.lo + 1.0;
  return out;
}

std::vector<double> project(const Measure& m, double theta) {
  const std::vector<double> v{std::cos(theta), std::sin(theta)};
  std::vector<double> out;
  out.reserve(m.size());
  for (const auto& p : m.points()) out.push_back(dot(p, v));
  return out;
}

struct Probe {
  Window w1, w2;
  double gap() const { return w1.mid() - w2.mid(); }
  bool overlap() const { return std::max(w1.lo, w2.lo) < std::min(w1.hi, w2.hi); }
};

}  // namespace

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q) {
  if (values.empty() || values.size() != weights.size()) {
    throw InputError("weighted_quantile: values and weights must be nonempty and of equal length");
  }
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("weighted_quantile: q must lie in [0, 1]");
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double total = 0.0;
  for (double w : weights) total += w;
  double acc = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    acc += weights[idx[k]];
    // Take the whole atom at this value before testing.
    if (k + 1 < idx.size() && values[idx[k + 1]] == values[idx[k]]) continue;
    if (acc >= q * total - kMassSlack) return values[idx[k]];
  }
  return values[idx.back()];
}

double bisect_1d(const Measure& m, double q) {
  if (m.dim() != 1) throw UnsupportedDimension("bisect_1d: measure must be one-dimensional");
  std::vector<double> xs;
  xs.reserve(m.size());
  for (const auto& p : m.points()) xs.push_back(p[0]);
  return weighted_quantile(xs, m.weights(), q);
}

HamSandwichCut ham_sandwich_2d(const Measure& m1, const Measure& m2, int grid) {
  if (m1.dim() != 2 || m2.dim() != 2) throw UnsupportedDimension("ham_sandwich_2d: measures must lie in the plane");
  if (grid < 2) throw InputError("ham_sandwich_2d: grid must be >= 2");
  auto probe = [&](double theta) {
    return Probe{median_window(project(m1, theta), m1.weights()), median_window(project(m2, theta), m2.weights())};
  };
  auto make = [&](double theta, const Probe& p) {
    const double a = 0.5 * (std::max(p.w1.lo, p.w2.lo) + std::min(p.w1.hi, p.w2.hi));
    HamSandwichCut cut;
    cut.line = OrientedHyperplane({std::cos(theta), std::sin(theta)}, a);
    const MeasureSet ms(2, {m1, m2});
    cut.discrepancy = discrepancy(halving_tree(cut.line), ms);
    cut.exact = cut.discrepancy <= 1e-9;
    return cut;
  };

  const double step = std::numbers::pi / grid;
  double t0 = 0.0;
  Probe p0 = probe(t0);
  if (p0.overlap()) return make(t0, p0);
  for (int k = 1; k <= grid; ++k) {
    const double t1 = k * step;
    const Probe p1 = probe(t1);
    if (p1.overlap()) return make(t1, p1);
    if ((p0.gap() < 0.0) != (p1.gap() < 0.0)) {
      double lo = t0, hi = t1;
      const bool lo_negative = p0.gap() < 0.0;
      Probe best = p1;
      double best_t = t1;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const Probe pm = probe(mid);
        if (pm.overlap()) return make(mid, pm);
        if (std::abs(pm.gap()) < std::abs(best.gap())) {
          best = pm;
          best_t = mid;
        }
        if ((pm.gap() < 0.0) == lo_negative) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      // Windows never overlapped: return the closest line found.
      HamSandwichCut cut;
      cut.line = OrientedHyperplane({std::cos(best_t), std::sin(best_t)}, 0.5 * (best.w1.mid() + best.w2.mid()));
      const MeasureSet ms(2, {m1, m2});
      cut.discrepancy = discrepancy(halving_tree(cut.line), ms);
      cut.exact = cut.discrepancy <= 1e-9;
      return cut;
    }
    t0 = t1;
    p0 = p1;
  }
  throw ResolutionError("ham_sandwich_2d: no sign change of the median gap over the direction grid");
}

PartitionTree halving_tree(const OrientedHyperplane& line) {
  const std::size_t d = line.v().size();
  return join_trees(PartitionTree::whole(1, d), PartitionTree::whole(2, d), line.v(), line.a());
}

}  // namespace equipart
