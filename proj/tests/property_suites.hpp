#pragma once

// Randomized property suites. Each returns its violation count.

#include <cmath>
#include <random>

#include "equipart/geometry.hpp"
#include "equipart/measures.hpp"
#include "test_util.hpp"

namespace equipart::testing {

inline constexpr int kTrials = 1000;

struct Constraint {
  OrientedHyperplane h;
  bool left;
};

// Membership by explicit constraints: the halfspace chain from the root and
// the leaf's dominance inequalities with the lowest-index tie rule.
inline bool in_cell(const PartitionTree& t, std::span<const double> x, int leaf, int cell, int& counter,
                    std::vector<Constraint>& chain) {
  if (t.is_node()) {
    const auto& n = t.node();
    chain.push_back({n.cut, true});
    const bool l = in_cell(*n.left, x, leaf, cell, counter, chain);
    chain.back().left = false;
    const bool r = !l && in_cell(*n.right, x, leaf, cell, counter, chain);
    chain.pop_back();
    return l || r;
  }
  if (++counter != leaf) return false;
  for (const auto& c : chain) {
    const Side s = halfspace_side(c.h, x);
    if (c.left && s == Side::Minus) return false;
    if (!c.left && s != Side::Minus) return false;
  }
  if (t.is_whole_leaf()) return cell == 1;
  const auto& fs = t.power_leaf().spec.functionals();
  const double mine = fs[static_cast<std::size_t>(cell - 1)](x);
  for (int j = 1; j <= static_cast<int>(fs.size()); ++j) {
    const double other = fs[static_cast<std::size_t>(j - 1)](x);
    if (j < cell && !(mine > other)) return false;
    if (j > cell && !(mine >= other)) return false;
  }
  return true;
}

inline bool tie_free(const PowerDiagramSpec& spec, std::span<const double> x) {
  std::vector<double> v;
  for (const auto& f : spec.functionals()) v.push_back(f(x));
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (std::abs(v[i] - v[j]) < 1e-9 * (1.0 + std::abs(v[i]))) return false;
    }
  }
  return true;
}


inline int partition_of_unity(int trials = kTrials) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> rr(2, 4), tt(1, 4), dd(1, 3);
  int violations = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t d = static_cast<std::size_t>(dd(rng));
    const auto t = testing::random_tree(rng, d, rr(rng), tt(rng));
    const auto ms = testing::random_measures(rng, d, 3, 25);
    const auto s = thief_shares(t, ms);
    for (std::size_t i = 0; i < s.rows(); ++i) {
      double sum = 0.0;
      for (double x : s.row(i)) sum += x;
      violations += std::abs(sum - 1.0) > 1e-12;
    }
  }
  return violations;
}

inline int phi_blocks_sum_to_zero(int trials = kTrials) {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<int> rr(2, 5), tt(1, 4);
  int violations = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto t = testing::random_tree(rng, 2, rr(rng), tt(rng));
    const auto ms = testing::random_measures(rng, 2, 3, 25);
    const auto p = phi(t, ms);
    for (std::size_t i = 0; i < p.rows(); ++i) {
      double sum = 0.0;
      for (double x : p.row(i)) sum += x;
      violations += std::abs(sum) > 1e-12;
    }
  }
  return violations;
}

inline int symmetric_equivariance(int trials = kTrials) {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> rr(2, 5), tt(1, 4);
  int violations = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const int r = rr(rng);
    const auto t = testing::random_tree(rng, 2, r, tt(rng));
    const auto ms = testing::random_measures(rng, 2, 3, 25);
    const auto pi = testing::random_permutation(rng, r);
    const auto before = phi(t, ms);
    const auto after = phi(apply_symmetry(pi, t), ms);
    for (std::size_t i = 0; i < before.rows(); ++i) {
      for (int s = 1; s <= r; ++s) {
        violations += std::abs(after(i, static_cast<std::size_t>(s - 1)) -
                               before(i, static_cast<std::size_t>(pi(s) - 1))) > 1e-12;
      }
    }
  }
  return violations;
}

inline int argmax_invariance(int trials = kTrials) {
  std::mt19937_64 rng(104);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> lam(0.01, 100.0);
  std::uniform_int_distribution<int> rr(2, 6);
  int violations = 0, checked = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(trial % 2);
    const auto spec = testing::random_leaf(rng, d, rr(rng));
    AffineFunctional shift;
    shift.gradient.resize(d);
    for (auto& g : shift.gradient) g = nd(rng);
    shift.offset = nd(rng);
    const double l = lam(rng);
    std::vector<AffineFunctional> shifted, scaled;
    for (const auto& f : spec.functionals()) {
      AffineFunctional a = f, b = f;
      for (std::size_t j = 0; j < d; ++j) {
        a.gradient[j] += shift.gradient[j];
        b.gradient[j] *= l;
      }
      a.offset += shift.offset;
      b.offset *= l;
      shifted.push_back(a);
      scaled.push_back(b);
    }
    const PowerDiagramSpec s1(shifted), s2(scaled);
    for (int k = 0; k < 5; ++k) {
      Point x(d);
      for (auto& c : x) c = 2.0 * nd(rng);
      if (!tie_free(spec, x)) continue;
      ++checked;
      const int base = power_cell_index(spec, x);
      violations += power_cell_index(s1, x) != base;
      violations += power_cell_index(s2, x) != base;
    }
  }
  if (checked < 4 * trials) ++violations;  // too few tie-free samples to mean anything
  return violations;
}

inline int membership_agreement(int trials = kTrials) {
  std::mt19937_64 rng(105);
  std::normal_distribution<double> nd(0.0, 1.5);
  std::uniform_int_distribution<int> rr(2, 4), tt(1, 5);
  int violations = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 3);
    const auto t = testing::random_tree(rng, d, rr(rng), tt(rng));
    const auto cs = cells(t);
    Point x(d);
    for (auto& c : x) c = nd(rng);
    // occasionally land exactly on the root cut to exercise the tie rule
    if (trial % 10 == 0 && t.is_node() && t.node().cut.a().is_finite()) {
      const auto& v = t.node().cut.v();
      const double shift = t.node().cut.a().value() - dot(x, v);
      for (std::size_t j = 0; j < d; ++j) x[j] += shift * v[j];
    }
    int matches = 0;
    CellRef found{};
    for (const auto& c : cs) {
      int counter = 0;
      std::vector<Constraint> chain;
      if (in_cell(t, x, c.leaf_index, c.cell_index, counter, chain)) {
        ++matches;
        found = c;
      }
    }
    violations += matches != 1 || !(found == assign_point(t, x));
  }
  return violations;
}

inline int clipped_area_sum(int trials = kTrials) {
  std::mt19937_64 rng(106);
  std::uniform_int_distribution<int> rr(2, 5), tt(1, 5);
  std::uniform_real_distribution<double> u(-3.0, 3.0), side(0.5, 4.0);
  int violations = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto t = testing::random_tree(rng, 2, rr(rng), tt(rng));
    const double x0 = u(rng), y0 = u(rng);
    const Box2 box{x0, y0, x0 + side(rng), y0 + side(rng)};
    double total = 0.0;
    for (const auto& c : cells(t)) total += polygon_area(cell_polytope(t, c, box));
    violations += std::abs(total - box.area()) > 1e-6;
  }
  return violations;
}

inline int totality(int trials = kTrials) {
  std::mt19937_64 rng(107);
  std::normal_distribution<double> nd(0.0, 3.0);
  int violations = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto t = testing::random_tree(rng, 2, 3, 4);
    const CellRef c = assign_point(t, Point{nd(rng), nd(rng)});
    violations += c.leaf_index < 1 || c.leaf_index > t.leaf_count() || c.cell_index < 1 || c.cell_index > 3 ||
                  c.thief != c.cell_index;
  }
  return violations;
}

}  // namespace equipart::testing
