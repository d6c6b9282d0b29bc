#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"

#include "equipart/error.hpp"
#include "equipart/evaluator.hpp"
#include "equipart/measures.hpp"
#include "equipart/tree_io.hpp"
#include "test_util.hpp"

using namespace equipart;

namespace {

MeasureSet line_set(std::vector<double> xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back({x});
  return MeasureSet(1, {Measure("m", pts)});
}

PartitionTree line_cut(ExtendedReal a) {
  return join_trees(PartitionTree::whole(1, 1), PartitionTree::whole(2, 1), {1.0}, a);
}

}  // namespace

TEST_CASE("load_measures normalizes and validates") {
  std::istringstream ok(R"({"dim":1,"measures":[{"name":"a","points":[[0],[1]],"weights":[2,2]}]})");
  const MeasureSet ms = load_measures(ok);
  CHECK(ms[0].weights() == std::vector<double>{0.5, 0.5});

  std::istringstream mixed(R"({"dim":2,"measures":[{"name":"a","points":[[0,1],[1,2,3]]}]})");
  CHECK_THROWS_AS(load_measures(mixed), InputError);
  std::istringstream zero(R"({"dim":1,"measures":[{"name":"a","points":[[0],[1]],"weights":[1,0]}]})");
  CHECK_THROWS_AS(load_measures(zero), InputError);
  std::istringstream junk("{not json");
  CHECK_THROWS_AS(load_measures(junk), InputError);
}

TEST_CASE("measure json round trip") {
  std::mt19937_64 rng(2);
  const MeasureSet ms = testing::random_measures(rng, 3, 2, 20);
  const MeasureSet back = measures_from_json(measures_to_json(ms));
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].points() == ms[i].points());
    for (std::size_t k = 0; k < ms[i].size(); ++k) CHECK(back[i].weights()[k] == doctest::Approx(ms[i].weights()[k]).epsilon(1e-15));
  }
}

TEST_CASE("thief_shares and phi examples") {
  const auto sym = line_set({-2.0, -1.0, 1.0, 2.0});
  const ShareMatrix s = thief_shares(line_cut(0.0), sym);
  CHECK(s(0, 0) == 0.5);
  CHECK(s(0, 1) == 0.5);
  CHECK(phi(s)(0, 0) == 0.0);
  CHECK(discrepancy(line_cut(0.0), sym) == 0.0);

  const auto three = line_set({-1.0, 1.0, 3.0});
  const auto leaf = PartitionTree::leaf(PowerDiagramSpec({{{1.0}, 0.0}, {{-1.0}, 0.0}}));
  const ShareMatrix s3 = thief_shares(leaf, three);
  CHECK(s3(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s3(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const auto p3 = phi(s3);
  CHECK(p3(0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(p3(0, 1) == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
  CHECK(discrepancy(p3) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  const auto all_left = line_cut(ExtendedReal::minus_infinity());
  const auto pw = phi(all_left, sym);
  CHECK(pw(0, 0) == 0.5);
  CHECK(pw(0, 1) == -0.5);

  const auto leaf2 = PartitionTree::leaf(PowerDiagramSpec({{{1.0, 0.0}, 0.0}, {{-1.0, 0.0}, 0.0}}));
  CHECK_THROWS_AS(thief_shares(leaf2, sym), InputError);
}

TEST_CASE("discrepancy is monotone under adding a measure") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = testing::random_tree(rng, 2, 2, 2);
    const auto ms = testing::random_measures(rng, 2, 2, 30);
    const MeasureSet more(2, {ms[0], ms[1], ms[1]});
    CHECK(discrepancy(t, more) >= discrepancy(t, ms));
  }
}

TEST_CASE("thief_shares matches a per-point tally") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = testing::random_tree(rng, 2, 3, 3);
    const auto ms = testing::random_measures(rng, 2, 4, 40);
    const ShareMatrix s = thief_shares(t, ms);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      std::vector<double> tally(3, 0.0);
      for (std::size_t k = 0; k < ms[i].size(); ++k) {
        tally[static_cast<std::size_t>(assign_point(t, ms[i].points()[k]).thief - 1)] += ms[i].weights()[k];
      }
      for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(s(i, c) - tally[c]) < 1e-12);
    }
  }
}

TEST_CASE("batch evaluation reproduces assign_point") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = testing::random_tree(rng, 3, 2, 4);
    const auto ms = testing::random_measures(rng, 3, 2, 50);
    const PointBlock block(ms);
    TreeEvaluator eval(block);
    const auto& got = eval.hard_labels(FlatTree(t));
    std::size_t k = 0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      for (const auto& p : ms[i].points()) CHECK(got[k++] == assign_point(t, p).thief);
    }
    CHECK(eval.hard_shares(FlatTree(t)) == thief_shares(t, ms));
  }
}

TEST_CASE("stability under small perturbations") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = testing::random_tree(rng, 2, 2, 3);
    const auto ms = testing::random_measures(rng, 2, 2, 40);
    const PointBlock block(ms);
    TreeEvaluator eval(block);
    const FlatTree flat(t);
    const double margin = eval.min_margin(flat);
    if (!(margin > 1e-9)) continue;
    const double eps = margin / 4.0;
    std::vector<Measure> moved;
    for (const auto& m : ms.measures()) {
      std::vector<Point> pts = m.points();
      for (auto& p : pts) {
        for (auto& x : p) x += eps * u(rng) / std::sqrt(2.0);
      }
      moved.emplace_back(m.name(), pts, m.weights());
    }
    // weights are renormalized on construction, so compare to rounding
    const auto before = thief_shares(t, ms);
    const auto after = thief_shares(t, MeasureSet(2, moved));
    for (std::size_t k = 0; k < before.data().size(); ++k) CHECK(std::abs(before.data()[k] - after.data()[k]) < 1e-14);
  }
}

TEST_CASE("share report") {
  const auto sym = line_set({-2.0, -1.0, 1.0, 2.0});
  const auto j = share_report(thief_shares(line_cut(1.5), sym));
  CHECK(j["shares"][0][0].get<double>() == 0.25);
  CHECK(j["phi"][0][1].get<double>() == 0.25);
  CHECK(j["discrepancy"].get<double>() == 0.25);
}

TEST_CASE("tree file round trip") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = testing::random_tree(rng, 2, 3, 3);
    CHECK(tree_from_json(tree_to_json(t)) == t);
  }
  const auto inf = join_trees(PartitionTree::whole(1, 2), PartitionTree::whole(2, 2), {0.0, 1.0},
                              ExtendedReal::plus_infinity());
  const auto j = tree_to_json(inf);
  CHECK(j["a"] == "+inf");
  CHECK(tree_from_json(j) == inf);
  CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"type":"node","v":[1,0],"a":"big"})")), InputError);
  CHECK_THROWS_AS(tree_from_json(nlohmann::json::parse(R"({"type":"leaf","functionals":[[1,0],[1,0]]})")),
                  InputError);
}
