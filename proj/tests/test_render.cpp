#include <limits>
#include <random>
#include <string>

#include "doctest.h"

#include "equipart/error.hpp"
#include "equipart/render.hpp"
#include "test_util.hpp"

using namespace equipart;

namespace {

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

MeasureSet two_points() { return MeasureSet(2, {Measure("m", {{-0.5, 0.0}, {0.5, 0.0}})}); }

}  // namespace

TEST_CASE("single cut renders two polygons in two colors") {
  const auto t = join_trees(PartitionTree::whole(1, 2), PartitionTree::whole(2, 2), {1.0, 0.0}, 0.0);
  RenderSpec spec;
  const std::string svg = render_svg(t, two_points(), spec);
  CHECK(count(svg, "<polygon") == 2);
  CHECK(count(svg, "class=\"thief-1\"") == 1);
  CHECK(count(svg, "class=\"thief-2\"") == 1);
  CHECK(count(svg, spec.palette[0]) >= 1);
  CHECK(count(svg, spec.palette[1]) >= 1);
  CHECK(count(svg, "<circle") == 2);
}

TEST_CASE("a node at +inf drops the left cells") {
  const auto t = join_trees(PartitionTree::whole(1, 2), PartitionTree::whole(2, 2), {1.0, 0.0},
                            ExtendedReal::plus_infinity());
  const std::string svg = render_svg(t, two_points(), RenderSpec{});
  CHECK(count(svg, "<polygon") == 1);
  CHECK(count(svg, "class=\"thief-1\"") == 0);
}

TEST_CASE("rendering is deterministic and validated") {
  std::mt19937_64 rng(1);
  const auto t = testing::random_tree(rng, 2, 3, 3);
  const auto ms = testing::random_measures(rng, 2, 2, 20);
  RenderSpec spec;
  spec.bbox = measures_bbox(ms);
  CHECK(render_svg(t, ms, spec) == render_svg(t, ms, spec));
  spec.width = 10;
  CHECK_THROWS_AS(render_svg(t, ms, spec), InputError);
  spec.width = 512;
  spec.bbox = Box2{1.0, 0.0, 0.0, 1.0};
  CHECK_THROWS_AS(render_svg(t, ms, spec), InputError);
  const auto leaf3d = PartitionTree::leaf(testing::random_leaf(rng, 3, 2));
  CHECK_THROWS_AS(render_svg(leaf3d, testing::random_measures(rng, 3, 1, 5), RenderSpec{}), UnsupportedDimension);
}

TEST_CASE("measures bbox pads the points") {
  const auto b = measures_bbox(MeasureSet(2, {Measure("m", {{0.0, 0.0}, {2.0, 1.0}})}));
  CHECK(b.xmin == doctest::Approx(-0.1));
  CHECK(b.xmax == doctest::Approx(2.1));
  CHECK(b.ymin == doctest::Approx(-0.1));
  CHECK(b.ymax == doctest::Approx(1.1));
}
