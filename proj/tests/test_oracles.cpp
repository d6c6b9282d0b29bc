#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "doctest.h"

#include "equipart/error.hpp"
#include "equipart/oracles.hpp"
#include "test_util.hpp"

using namespace equipart;

namespace {

// Independent check: does any split with exactly k cuts exist?
bool some_split_with(const Necklace& nk, int k) {
  const int n = static_cast<int>(nk.beads.size());
  const int m = nk.types();
  std::vector<int> cuts;
  std::function<bool(int)> choose = [&](int from) -> bool {
    if (static_cast<int>(cuts.size()) == k) {
      const int pieces = k + 1;
      std::vector<int> labels(static_cast<std::size_t>(pieces), 1);
      while (true) {
        if (necklace_split_valid(nk, NecklaceSplit{cuts, labels})) return true;
        int i = 0;
        while (i < pieces && labels[static_cast<std::size_t>(i)] == nk.thieves) labels[static_cast<std::size_t>(i++)] = 1;
        if (i == pieces) return false;
        ++labels[static_cast<std::size_t>(i)];
      }
    }
    for (int c = from; c < n; ++c) {
      cuts.push_back(c);
      if (choose(c + 1)) return true;
      cuts.pop_back();
    }
    return false;
  };
  (void)m;
  return choose(1);
}

std::vector<Necklace> even_necklaces(int max_len, int max_types) {
  std::vector<Necklace> out;
  for (int len = 2; len <= max_len; len += 2) {
    std::vector<int> b(static_cast<std::size_t>(len), 1);
    while (true) {
      // canonical: type ids appear in first-occurrence order
      int seen = 0;
      bool canon = true;
      std::vector<int> count(static_cast<std::size_t>(max_types + 1), 0);
      for (int x : b) {
        if (x > seen + 1) canon = false;
        seen = std::max(seen, x);
        ++count[static_cast<std::size_t>(x)];
      }
      bool even = true;
      for (int c : count) even = even && c % 2 == 0;
      if (canon && even) out.push_back(Necklace{b, 2});
      int i = len - 1;
      while (i >= 0 && b[static_cast<std::size_t>(i)] == max_types) b[static_cast<std::size_t>(i--)] = 1;
      if (i < 0) break;
      ++b[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

double h_plus_share(const Measure& m, const std::vector<double>& v, double a) {
  double s = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (halfspace_side(OrientedHyperplane(v, a), m.points()[k]) != Side::Minus) s += m.weights()[k];
  }
  return s;
}

}  // namespace

TEST_CASE("necklace examples") {
  auto s = necklace_split_exact(Necklace::from_string("AABB", 2));
  CHECK(s.cuts == std::vector<int>{1, 3});
  CHECK(s.labels == std::vector<int>{1, 2, 1});

  s = necklace_split_exact(Necklace::from_string("AA", 2));
  CHECK(s.cuts == std::vector<int>{1});

  // AB|AB: one cut already gives each thief one bead of each type.
  const auto abab = Necklace::from_string("ABAB", 2);
  s = necklace_split_exact(abab);
  CHECK(s.cuts == std::vector<int>{2});
  CHECK(s.labels == std::vector<int>{1, 2});

  CHECK_FALSE(some_split_with(Necklace::from_string("AABB", 2), 1));

  CHECK_THROWS_AS(necklace_split_exact(Necklace::from_string("AAB", 2)), InputError);
  CHECK_THROWS_AS(necklace_split_exact(Necklace{std::vector<int>(26, 1), 2}), InputError);
  CHECK(Necklace::from_json(nlohmann::json::parse("[2,1,1,2]"), 2).beads == std::vector<int>{2, 1, 1, 2});
}

TEST_CASE("necklace splits are valid and minimal") {
  const auto all = even_necklaces(8, 3);
  CHECK(all.size() > 100);
  for (const auto& nk : all) {
    const auto s = necklace_split_exact(nk);
    CHECK(necklace_split_valid(nk, s));
    CHECK(static_cast<int>(s.cuts.size()) <= nk.types());
    if (!s.cuts.empty()) CHECK_FALSE(some_split_with(nk, static_cast<int>(s.cuts.size()) - 1));
  }
}

TEST_CASE("three thieves") {
  for (const char* beads : {"AAABBB", "ABCABCABC", "AABBAABBAABB", "ABABAB"}) {
    const auto nk = Necklace::from_string(beads, 3);
    const auto s = necklace_split_exact(nk);
    CHECK(necklace_split_valid(nk, s));
    CHECK(static_cast<int>(s.cuts.size()) <= 2 * nk.types());
  }
}

TEST_CASE("bounds examples") {
  CHECK(*bounds(6, 3, 2).lower_M_prime == 4);
  for (int d = 1; d <= 10; ++d) {
    const auto b3 = bounds(3, 2, d);
    CHECK(*b3.lower_M_dprime == d + 1);
    CHECK(*b3.upper_M == d + 1);
    CHECK(*b3.exact_M_dprime == d + 1);
    CHECK(*bounds(2, 2, d).exact_M == d);
    CHECK(*bounds(2, 2, d).exact_M_dprime == d);
  }
  CHECK(*bounds(5, 2, 2).upper_M == 7);
  CHECK(*bounds(7, 3, 1).exact_M == 3);
  CHECK_FALSE(bounds(6, 4, 2).lower_M_prime.has_value());
  CHECK(*bounds(3, 3, 4).exact_M_dprime == 1);
  CHECK_THROWS_AS(bounds(3, 1, 2), InputError);
  const auto j = bounds_to_json(bounds(4, 3, 2));
  CHECK(j["lower_M_prime"].is_null());
  CHECK(j["applicable"]["upper_M_dprime"] == true);
}

TEST_CASE("bounds consistency") {
  for (int n = 1; n <= 50; ++n) {
    for (int d = 1; d <= 50; ++d) {
      for (int r = 2; r <= 7; ++r) {
        const auto b = bounds(n, r, d);
        if (b.lower_M_dprime && b.upper_M_dprime) CHECK(*b.lower_M_dprime <= *b.upper_M_dprime);
        if (b.exact_M_dprime && b.lower_M_dprime) CHECK(*b.exact_M_dprime >= *b.lower_M_dprime);
        if (b.exact_M_dprime && b.upper_M_dprime) CHECK(*b.exact_M_dprime <= *b.upper_M_dprime);
      }
    }
  }
}

TEST_CASE("simplex generator") {
  GenerateOptions opt;
  opt.kind = ConfigKind::Simplex;
  opt.seed = 1;
  const auto c = generate(opt);
  CHECK(c.measures.size() == 4);
  CHECK(c.metadata["validation"]["passed"] == true);

  // Any triangle with one point from each vertex cloud contains the centroid
  // cloud's center: sample many such triangles.
  const auto& centers = c.metadata["centers"];
  const Point g = centers[3].get<Point>();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 2000; ++trial) {
    std::array<Point, 3> tri;
    for (int v = 0; v < 3; ++v) {
      const auto& pts = c.measures[static_cast<std::size_t>(v)].points();
      tri[static_cast<std::size_t>(v)] = pts[std::uniform_int_distribution<std::size_t>(0, pts.size() - 1)(rng)];
    }
    CHECK(triangle_depth(g, tri[0], tri[1], tri[2]) > 0.0);
  }
  opt.dim = 3;
  CHECK(generate(opt).measures.size() == 5);
}

TEST_CASE("pentagon generator") {
  GenerateOptions opt;
  opt.kind = ConfigKind::Pentagon;
  opt.seed = 3;
  const auto c = generate(opt);
  CHECK(c.measures.size() == 8);
  const auto& v = c.metadata["validation"];
  CHECK(v["passed"] == true);
  CHECK(v["triangles"].size() == 10);
  const double eps = c.metadata["eps"].get<double>();
  const auto& centers = c.metadata["centers"];
  for (const auto& t : v["triangles"]) {
    const auto idx = t["vertices"].get<std::vector<int>>();
    const Point s = centers[5 + t["stabbed_by"].get<std::size_t>()].get<Point>();
    CHECK(triangle_depth(s, centers[idx[0]].get<Point>(), centers[idx[1]].get<Point>(),
                         centers[idx[2]].get<Point>()) > eps);
  }
}

TEST_CASE("spheres generator") {
  GenerateOptions opt;
  opt.kind = ConfigKind::Spheres;
  opt.thieves = 3;
  const auto c = generate(opt);
  const double eps = c.metadata["eps"].get<double>();
  const auto radii = c.metadata["radii"].get<std::vector<double>>();
  const auto circ = c.metadata["validation"]["circumradii"].get<std::vector<double>>();
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(circ[i] - radii[i]) <= eps);
  CHECK(c.metadata["odd_thieves"] == true);
  CHECK_THROWS_AS(parse_config_kind("hexagon"), InputError);
}

TEST_CASE("spheres obstruction") {
  GenerateOptions opt;
  opt.kind = ConfigKind::Spheres;
  opt.thieves = 3;
  opt.npoints = 300;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    opt.seed = seed;
    const auto c = generate(opt);
    std::mt19937_64 rng(seed);
    const auto v = testing::random_unit(rng, 2);
    int hits = 0;
    for (int step = 0; step <= 50000; ++step) {
      const double a = -2.5 + 5.0 * step / 50000.0;
      const double s0 = h_plus_share(c.measures[0], v, a);
      const double s1 = h_plus_share(c.measures[1], v, a);
      for (int k = 1; k <= 2; ++k) {
        const bool both = std::abs(s0 - k / 3.0) < 1e-12 && std::abs(s1 - k / 3.0) < 1e-12;
        hits += both;
      }
    }
    CHECK(hits == 0);
  }
}

TEST_CASE("brute force median") {
  std::vector<Point> pts{{-2.0}, {-1.0}, {1.0}, {2.0}};
  const MeasureSet ms(1, {Measure("m", pts)});
  const auto tmpl = TreeTemplate::from_json(
      nlohmann::json::parse(R"({"type":"node","v":[1],"a":null,
        "left":{"type":"whole","thief":1},"right":{"type":"whole","thief":2}})"),
      1, 2);
  const auto r = brute_force_fair(ms, tmpl, 5);
  CHECK(r.discrepancy == 0.0);
  CHECK(r.evaluated == 5);
  CHECK_THROWS_AS(brute_force_fair(ms, TreeTemplate::balanced(1, 8, 2), 10), InputError);
  CHECK_THROWS_AS(brute_force_fair(ms, tmpl, 1), InputError);
}

TEST_CASE("brute force near the ham sandwich line") {
  std::mt19937_64 rng(4);
  const auto ms = testing::random_measures(rng, 2, 2, 40, false);
  const auto tmpl = TreeTemplate::balanced(2, 1, 2).with_frame(fit_frame(ms));
  const std::size_t grid = 41;
  const auto bf = brute_force_fair(ms, tmpl, grid);

  const auto cut = ham_sandwich_2d(ms[0], ms[1]);
  const auto& v = cut.line.v();
  const AffineFunctional f1{v, -cut.line.a().value()};
  const AffineFunctional f2{{0.0, 0.0}, 0.0};
  ParamVector p = tmpl.encode(PartitionTree::leaf(PowerDiagramSpec({f1, f2})));
  // snap to the nearest grid coordinate
  const auto axis = brute_force_axis(grid, false);
  for (auto& x : p) {
    double best = axis[0];
    for (double g : axis) {
      if (std::abs(g - x) < std::abs(best - x)) best = g;
    }
    x = best;
  }
  CHECK(bf.discrepancy <= discrepancy(decode(tmpl, p), ms));
  CHECK(bf.discrepancy < 0.1);
}

TEST_CASE("probe soundness") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const auto ms = testing::random_measures(rng, 2, 3, 30);
    const auto tmpl = TreeTemplate::balanced(2, 1, 2);
    const auto rep = infeasibility_probe(ms, tmpl, 20000, static_cast<std::uint64_t>(trial));
    const auto again = decode(tmpl.with_frame(fit_frame(ms)), rep.params);
    CHECK(std::abs(discrepancy(again, ms) - rep.best_discrepancy) <= 1e-12);
    CHECK(std::abs(discrepancy(rep.tree, ms) - rep.best_discrepancy) <= 1e-12);
    CHECK(rep.best_discrepancy <= rep.solver_discrepancy);
    CHECK(probe_report_to_json(rep)["label"] == "evidence");
  }
  const auto ms = testing::random_measures(rng, 2, 2, 10);
  CHECK_THROWS_AS(infeasibility_probe(ms, TreeTemplate::balanced(2, 1, 2), 10, 0), InputError);
}

TEST_CASE("pentagon probe stays away from zero") {
  GenerateOptions opt;
  opt.kind = ConfigKind::Pentagon;
  opt.seed = 1;
  const auto c = generate(opt);
  const auto rep = infeasibility_probe(c.measures, pentagon_probe_template(), 20000, 1);
  CHECK(rep.best_discrepancy > 1e-2);
}
