#pragma once

// SVG rendering of planar partitions and the measures they split.

#include <string>
#include <vector>

#include "equipart/geometry.hpp"
#include "equipart/measures.hpp"

namespace equipart {

struct RenderSpec {
  Box2 bbox{-1.0, -1.0, 1.0, 1.0};
  int width = 512;
  int height = 512;
  std::vector<std::string> palette{"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                   "#b07aa1", "#76b7b2", "#edc948", "#9c755f"};  // thief s -> palette[s-1 mod size]
  double point_radius = 3.0;  // pixels, for the heaviest point
  double stroke_width = 1.0;

  void validate() const;
};

// Bounding box of all measure points, padded by `pad` times its larger side.
Box2 measures_bbox(const MeasureSet& ms, double pad = 0.05);

// One filled polygon per nonempty clipped cell, then the measure points with
// area proportional to weight. Deterministic for identical inputs.
std::string render_svg(const PartitionTree& tree, const MeasureSet& ms, const RenderSpec& spec);

}  // namespace equipart
