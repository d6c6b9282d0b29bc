#pragma once

// Search for fair distributions over a fixed tree template.
//
// A TreeTemplate fixes the tree shape and the node directions; its free
// parameters are one compactified offset per free node and (r-1)(d+1)
// functional coordinates per free power leaf (the last functional of every
// free leaf is pinned to the zero functional). Parameters live in a
// normalized frame x = center + scale * x' so the search runs at unit scale;
// decode maps them to a tree in the original coordinates.
//
// Offset compactification, in frame units:
//   u <= -1  ->  a = -inf
//   u >= +1  ->  a = +inf
//   else     ->  a = tan(pi * u / 2)
// i.e. a(u) = tan(pi * sigma(u) - pi/2) with sigma(u) = clamp((u + 1) / 2, 0, 1).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "equipart/evaluator.hpp"
#include "equipart/geometry.hpp"
#include "equipart/measures.hpp"

namespace equipart {

using ParamVector = std::vector<double>;

struct Frame {
  std::vector<double> center;  // empty means the origin
  double scale = 1.0;
};

// Center = mean of the per-measure means; scale = RMS distance to it.
Frame fit_frame(const MeasureSet& ms);

class TreeTemplate {
 public:
  // Parses the tree file format where "a": null marks a free offset and
  // "functionals": null marks a free power leaf. A free leaf takes its cell
  // count from an optional "cells" field, else from `thieves`.
  static TreeTemplate from_json(const nlohmann::json& j, std::size_t dim, int thieves);
  // Balanced tree with t free power leaves of r cells; node k in preorder
  // gets direction e_{k mod d}.
  static TreeTemplate balanced(std::size_t dim, int t, int r);
  // Shape and directions of `tree`; every offset and power leaf becomes free.
  static TreeTemplate from_tree(const PartitionTree& tree);

  nlohmann::json to_json() const;

  std::size_t dim() const { return skeleton_.dim; }
  int thieves() const { return skeleton_.thieves; }
  int leaf_count() const { return static_cast<int>(skeleton_.leaves.size()); }
  std::size_t param_count() const { return param_count_; }
  const Frame& frame() const { return frame_; }
  TreeTemplate with_frame(Frame frame) const;

  // Writes decoded values into `out` (which must come from skeleton()); no
  // distinctness validation. Requires finite parameters of the right length.
  void decode_into(std::span<const double> p, FlatTree& out) const;
  const FlatTree& skeleton() const { return skeleton_; }

  // Inverse of decode for trees with this template's shape; fixed slots are
  // ignored and free leaves are gauge-shifted so their last functional is 0.
  ParamVector encode(const PartitionTree& tree) const;

  // Parameter index ranges: node offsets first (preorder), then leaves.
  bool is_offset_param(std::size_t i) const { return i < free_nodes_.size(); }

 private:
  FlatTree skeleton_;
  std::vector<std::size_t> free_nodes_;   // node indices with a free offset
  std::vector<std::size_t> free_leaves_;  // leaf indices with free functionals
  std::size_t param_count_ = 0;
  Frame frame_;
};

double decode_offset(double u);
double encode_offset(double a);

// Validated decode: length and finiteness checked, functionals must be
// pairwise distinct (InputError otherwise).
PartitionTree decode(const TreeTemplate& tmpl, std::span<const double> p);

struct SolveConfig {
  double tolerance = 1e-6;
  int restarts = 8;
  std::size_t max_evals = 20000;  // per restart
  std::uint64_t seed = 0;
  double init_scale = 1.0;

  void validate() const;
};

nlohmann::json config_to_json(const SolveConfig& cfg);
SolveConfig config_from_json(const nlohmann::json& j);

enum class SolveStatus { Fair, BestEffort };

struct SolveResult {
  SolveStatus status = SolveStatus::BestEffort;
  PartitionTree tree = PartitionTree::whole(1, 1);
  ShareMatrix shares;
  double discrepancy = 1.0;
  std::size_t evals_used = 0;   // summed over all restarts that ran
  int restart_index = 0;        // restart that produced `tree`
  std::uint64_t seed = 0;
  ParamVector params;           // best parameters (template frame)
  double margin = 0.0;          // smallest point-to-boundary distance
  double final_temperature = 0.0;
  double soft_hard_gap = 0.0;   // max |soft - hard| share at final_temperature
};

nlohmann::json result_to_json(const SolveResult& r);

SolveResult solve_fair(const TreeTemplate& tmpl, const MeasureSet& ms, const SolveConfig& cfg);

// Smallest offset a with weight{x <= a} >= q (left-continuous quantile, no
// interpolation inside atoms). d must be 1.
double bisect_1d(const Measure& m, double q);
// Same rule over raw values/weights.
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q);

struct HamSandwichCut {
  OrientedHyperplane line{{1.0, 0.0}, 0.0};
  bool exact = false;       // both H+ shares are 1/2 (within 1e-9)
  double discrepancy = 0.0;
};

// Rotating-direction bisection: returns a line halving both measures, with
// H+ (including the boundary) going to thief 1.
HamSandwichCut ham_sandwich_2d(const Measure& m1, const Measure& m2, int grid = 720);

// Node{line, whole thief 1, whole thief 2}.
PartitionTree halving_tree(const OrientedHyperplane& line);

}  // namespace equipart
