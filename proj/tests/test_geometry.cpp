#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "equipart/error.hpp"
#include "equipart/geometry.hpp"
#include "test_util.hpp"

using namespace equipart;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

PowerDiagramSpec pm_x() { return PowerDiagramSpec({{{1.0, 0.0}, 0.0}, {{-1.0, 0.0}, 0.0}}); }

PartitionTree vertical_cut(double a) {
  return join_trees(PartitionTree::whole(1, 2), PartitionTree::whole(2, 2), {1.0, 0.0}, a);
}

}  // namespace

TEST_CASE("extended reals") {
  CHECK(ExtendedReal(kInf) == ExtendedReal::plus_infinity());
  CHECK(ExtendedReal(-kInf) == ExtendedReal::minus_infinity());
  CHECK(ExtendedReal(2.5).value() == 2.5);
  CHECK_THROWS_AS(ExtendedReal(std::nan("")), InputError);
  CHECK_THROWS_AS(ExtendedReal::plus_infinity().value(), InputError);
  CHECK(ExtendedReal::minus_infinity().as_double() == -kInf);
}

TEST_CASE("halfspace_side examples") {
  CHECK(halfspace_side(OrientedHyperplane({1.0, 0.0}, 0.0), Point{2.0, 3.0}) == Side::Plus);
  CHECK(halfspace_side(OrientedHyperplane({1.0, 0.0}, ExtendedReal::plus_infinity()), Point{-7.0, 4.0}) ==
        Side::Minus);
  CHECK(halfspace_side(OrientedHyperplane({0.0, 1.0}, 5.0), Point{9.0, 5.0}) == Side::Boundary);
  CHECK(halfspace_side(OrientedHyperplane({0.0, 1.0}, ExtendedReal::minus_infinity()), Point{0.0, 1e300}) ==
        Side::Plus);
  CHECK_THROWS_AS(halfspace_side(OrientedHyperplane({1.0, 0.0}, 0.0), Point{1.0}), InputError);
  CHECK_THROWS_AS(OrientedHyperplane({1.0, 1.0}, 0.0), InputError);
}

TEST_CASE("power_cell_index examples") {
  CHECK(power_cell_index(pm_x(), Point{3.0, 1.0}) == 1);
  CHECK(power_cell_index(pm_x(), Point{0.0, 5.0}) == 1);

  // Voronoi functionals 2<x,p> - |p|^2 against a nearest-site scan.
  const std::vector<Point> sites{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  std::vector<AffineFunctional> fs;
  for (const auto& p : sites) fs.push_back({{2.0 * p[0], 2.0 * p[1]}, -(p[0] * p[0] + p[1] * p[1])});
  const PowerDiagramSpec vor(fs);
  const Point x{0.9, 0.1};
  int nearest = 0;
  double best = kInf;
  for (int i = 0; i < 3; ++i) {
    const double dx = x[0] - sites[i][0], dy = x[1] - sites[i][1];
    if (dx * dx + dy * dy < best) {
      best = dx * dx + dy * dy;
      nearest = i + 1;
    }
  }
  CHECK(nearest == 2);
  CHECK(power_cell_index(vor, x) == nearest);
}

TEST_CASE("power diagram validation") {
  CHECK_THROWS_AS(PowerDiagramSpec({{{1.0, 0.0}, 0.0}, {{1.0, 0.0}, 0.0}}), InputError);
  CHECK_THROWS_AS(PowerDiagramSpec({{{1.0, 0.0}, 0.0}, {{1.0}, 0.0}}), InputError);
  CHECK_THROWS_AS(PowerDiagramSpec({}), InputError);
}

TEST_CASE("assign_point examples") {
  const auto leaf = PartitionTree::leaf(pm_x());
  CHECK(assign_point(leaf, Point{-1.0, 0.0}) == CellRef{1, 2, 2});

  const auto t = join_trees(leaf, PartitionTree::leaf(pm_x()), {1.0, 0.0}, ExtendedReal::plus_infinity());
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 10.0);
  for (int k = 0; k < 100; ++k) CHECK(assign_point(t, Point{nd(rng), nd(rng)}).leaf_index == 2);
}

TEST_CASE("join_trees examples") {
  const auto t = join_trees(PartitionTree::leaf(pm_x()), PartitionTree::leaf(pm_x()), {1.0, 0.0}, 0.0);
  CHECK(t.cell_count() == 4);
  CHECK(t.leaf_count() == 2);
  CHECK(labels(t) == std::vector<int>{1, 2, 1, 2});
  CHECK(assign_point(t, Point{0.0, 3.0}).leaf_index == 1);  // boundary goes to H+

  const auto leaf3 = PartitionTree::leaf(PowerDiagramSpec({{{1.0, 0.0}, 0.0}, {{-1.0, 0.0}, 0.0}, {{0.0, 1.0}, 0.0}}));
  CHECK_THROWS_AS(join_trees(PartitionTree::leaf(pm_x()), leaf3, {1.0, 0.0}, 0.0), InputError);
  const auto leaf1d = PartitionTree::leaf(PowerDiagramSpec({{{1.0}, 0.0}, {{-1.0}, 0.0}}));
  CHECK_THROWS_AS(join_trees(PartitionTree::leaf(pm_x()), leaf1d, {1.0, 0.0}, 0.0), InputError);
}

TEST_CASE("apply_symmetry examples") {
  std::mt19937_64 rng(11);
  const auto t = testing::random_tree(rng, 2, 3, 3);
  CHECK(apply_symmetry(Permutation::identity(3), t) == t);
  CHECK_THROWS_AS(apply_symmetry(Permutation::identity(2), t), InputError);
  CHECK_THROWS_AS(Permutation({1, 1}), InputError);

  const auto leaf = PartitionTree::leaf(pm_x());
  const auto swapped = apply_symmetry(Permutation({2, 1}), leaf);
  CHECK(assign_point(swapped, Point{2.0, 0.0}).thief == 2);
  CHECK(assign_point(swapped, Point{-2.0, 0.0}).thief == 1);
}

TEST_CASE("cell_polytope examples") {
  const Box2 box{-1.0, -1.0, 1.0, 1.0};
  const auto t = vertical_cut(0.0);
  const auto cs = cells(t);
  REQUIRE(cs.size() == 2);
  CHECK(polygon_area(cell_polytope(t, cs[0], box)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(polygon_area(cell_polytope(t, cs[1], box)) == doctest::Approx(2.0).epsilon(1e-12));

  const auto inf = vertical_cut(kInf);
  CHECK(cell_polytope(inf, cells(inf)[0], box).empty());
  CHECK(polygon_area(cell_polytope(inf, cells(inf)[1], box)) == doctest::Approx(4.0));

  const auto leaf1d = PartitionTree::leaf(PowerDiagramSpec({{{1.0}, 0.0}, {{-1.0}, 0.0}}));
  CHECK_THROWS_AS(cell_polytope(leaf1d, cells(leaf1d)[0], box), UnsupportedDimension);
}

TEST_CASE("random tree areas sum to the box") {
  std::mt19937_64 rng(3);
  const Box2 box{-2.0, -1.5, 2.5, 2.0};
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = testing::random_tree(rng, 2, 3, 4);
    double total = 0.0;
    for (const auto& c : cells(t)) total += polygon_area(cell_polytope(t, c, box));
    CHECK(std::abs(total - box.area()) < 1e-9);
  }
}

TEST_CASE("r = 2 leaf agrees with the induced hyperplane") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto spec = testing::random_leaf(rng, 3, 2);
    const auto& f = spec.functionals();
    std::vector<double> g(3);
    double n2 = 0.0;
    for (int j = 0; j < 3; ++j) {
      g[j] = f[0].gradient[j] - f[1].gradient[j];
      n2 += g[j] * g[j];
    }
    const double n = std::sqrt(n2);
    for (auto& x : g) x /= n;
    const OrientedHyperplane h(g, (f[1].offset - f[0].offset) / n);
    const Point x{nd(rng), nd(rng), nd(rng)};
    const Side s = halfspace_side(h, x);
    if (s == Side::Boundary) continue;
    CHECK(power_cell_index(spec, x) == (s == Side::Plus ? 1 : 2));
  }
}

TEST_CASE("join consistency") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto l = testing::random_tree(rng, 2, 2, 2);
    const auto r = testing::random_tree(rng, 2, 2, 1);
    const auto v = testing::random_unit(rng, 2);
    const double a = nd(rng);
    const auto t = join_trees(l, r, v, a);
    const Point x{nd(rng), nd(rng)};
    const bool left = assign_point(t, x).leaf_index <= l.leaf_count();
    CHECK(left == (halfspace_side(OrientedHyperplane(v, a), x) != Side::Minus));
  }
}
