#pragma once

// Iterated labeled convex partitions of R^d.
//
// A partition is a binary tree. Internal nodes carry an oriented affine
// hyperplane (fixed unit direction v, extended-real offset a); the left
// subtree lives on H+ = {<x,v> >= a}, the right subtree on H- = {<x,v> <= a}.
// Leaves are either power diagrams (r affine functionals, cell i = argmax
// region of functional i, labeled thief i) or single-cell "whole" leaves
// that hand their entire region to one fixed thief.
//
// Points on a boundary are resolved deterministically: H+ wins at nodes and
// the lowest functional index wins at leaves.

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace equipart {

using Point = std::vector<double>;

class ExtendedReal {
 public:
  enum class Kind { Finite, PlusInfinity, MinusInfinity };

  constexpr ExtendedReal() = default;
  // +-inf doubles map to the infinite variants; NaN is rejected.
  ExtendedReal(double value);  // NOLINT: implicit from reals

  static constexpr ExtendedReal plus_infinity() { return ExtendedReal(Kind::PlusInfinity); }
  static constexpr ExtendedReal minus_infinity() { return ExtendedReal(Kind::MinusInfinity); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::Finite; }
  // Finite value, or +-infinity as an IEEE double.
  double as_double() const;
  // Throws InputError unless finite.
  double value() const;

  friend bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

 private:
  constexpr explicit ExtendedReal(Kind k) : kind_(k) {}

  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

enum class Side { Plus, Minus, Boundary };

class OrientedHyperplane {
 public:
  // v must be a unit vector (|‖v‖ - 1| <= 1e-12).
  OrientedHyperplane(std::vector<double> v, ExtendedReal a);

  const std::vector<double>& v() const { return v_; }
  ExtendedReal a() const { return a_; }
  std::size_t dim() const { return v_.size(); }

  friend bool operator==(const OrientedHyperplane&, const OrientedHyperplane&) = default;

 private:
  std::vector<double> v_;
  ExtendedReal a_;
};

/// x -> <x, gradient> + offset
struct AffineFunctional {
  std::vector<double> gradient;
  double offset = 0.0;

  double operator()(std::span<const double> x) const;
  friend bool operator==(const AffineFunctional&, const AffineFunctional&) = default;
};

inline constexpr double kDistinctTolerance = 1e-12;
inline constexpr double kUnitTolerance = 1e-12;

class PowerDiagramSpec {
 public:
  // Validates: r >= 1, common dimension >= 1, finite entries, functionals
  // pairwise distinct as points of R^{d+1}.
  explicit PowerDiagramSpec(std::vector<AffineFunctional> functionals);

  const std::vector<AffineFunctional>& functionals() const { return functionals_; }
  std::size_t cells() const { return functionals_.size(); }
  std::size_t dim() const { return functionals_.front().gradient.size(); }

  friend bool operator==(const PowerDiagramSpec&, const PowerDiagramSpec&) = default;

 private:
  std::vector<AffineFunctional> functionals_;
};

class Permutation {
 public:
  // images[i] = pi(i + 1), 1-based values; must be a bijection on [1, r].
  explicit Permutation(std::vector<int> images);
  static Permutation identity(int r);

  int size() const { return static_cast<int>(images_.size()); }
  // pi(i), 1-based.
  int operator()(int i) const { return images_[static_cast<std::size_t>(i - 1)]; }
  Permutation inverse() const;
  const std::vector<int>& images() const { return images_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> images_;
};

/// One labeled cell of a tree. Indices are 1-based; leaves in left-to-right order.
struct CellRef {
  int leaf_index = 1;
  int cell_index = 1;
  int thief = 1;

  friend bool operator==(const CellRef&, const CellRef&) = default;
};

class PartitionTree {
 public:
  struct PowerLeaf {
    PowerDiagramSpec spec;
    friend bool operator==(const PowerLeaf&, const PowerLeaf&) = default;
  };
  struct WholeLeaf {
    int thief = 1;
    std::size_t dim = 1;
    friend bool operator==(const WholeLeaf&, const WholeLeaf&) = default;
  };
  struct Node {
    OrientedHyperplane cut;
    std::shared_ptr<const PartitionTree> left;
    std::shared_ptr<const PartitionTree> right;
  };

  static PartitionTree leaf(PowerDiagramSpec spec);
  static PartitionTree whole(int thief, std::size_t dim);

  bool is_node() const { return std::holds_alternative<Node>(body_); }
  bool is_power_leaf() const { return std::holds_alternative<PowerLeaf>(body_); }
  bool is_whole_leaf() const { return std::holds_alternative<WholeLeaf>(body_); }
  const Node& node() const { return std::get<Node>(body_); }
  const PowerLeaf& power_leaf() const { return std::get<PowerLeaf>(body_); }
  const WholeLeaf& whole_leaf() const { return std::get<WholeLeaf>(body_); }

  std::size_t dim() const { return dim_; }
  // Number of thieves r: the power-leaf cell count, or the largest whole-leaf
  // label when the tree has no power leaves.
  int thieves() const { return power_cells_ > 0 ? power_cells_ : max_whole_thief_; }
  // Cell count shared by all power leaves, 0 if there are none.
  int power_cells() const { return power_cells_; }
  int leaf_count() const { return leaves_; }
  int cell_count() const { return cells_; }

  friend bool operator==(const PartitionTree& a, const PartitionTree& b);

 private:
  friend PartitionTree join_trees(PartitionTree left, PartitionTree right, std::vector<double> v,
                                  ExtendedReal a);

  explicit PartitionTree(std::variant<PowerLeaf, WholeLeaf, Node> body);

  std::variant<PowerLeaf, WholeLeaf, Node> body_;
  std::size_t dim_ = 0;
  int power_cells_ = 0;
  int max_whole_thief_ = 0;
  int leaves_ = 0;
  int cells_ = 0;
};

Side halfspace_side(const OrientedHyperplane& h, std::span<const double> x);

// 1-based index of the maximal functional; ties go to the lowest index.
int power_cell_index(const PowerDiagramSpec& spec, std::span<const double> x);

CellRef assign_point(const PartitionTree& tree, std::span<const double> x);

// Node{v, a, left, right}: left's cells restricted to H+, right's to H-.
PartitionTree join_trees(PartitionTree left, PartitionTree right, std::vector<double> v,
                         ExtendedReal a);

PartitionTree apply_symmetry(const Permutation& p, const PartitionTree& tree);

// All cells in label order (left subtree first).
std::vector<CellRef> cells(const PartitionTree& tree);

// Thief label sequence l(1..n) of the induced labeled partition.
std::vector<int> labels(const PartitionTree& tree);

struct Box2 {
  double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

  bool empty() const { return !(xmin < xmax && ymin < ymax); }
  double area() const { return (xmax - xmin) * (ymax - ymin); }
};

using Polygon2 = std::vector<std::array<double, 2>>;

// Clipped convex region of `cell` inside `box` (counter-clockwise, possibly
// empty). Only defined for d = 2.
Polygon2 cell_polytope(const PartitionTree& tree, const CellRef& cell, const Box2& box);

double polygon_area(const Polygon2& poly);

// Sequential dot product; the reference order every kernel reproduces.
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace equipart
