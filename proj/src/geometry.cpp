#include "equipart/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "equipart/error.hpp"

namespace equipart {

namespace {

void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw InputError(std::string(what) + ": dimension mismatch (expected " +
                     std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc = acc + a[k] * b[k];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// ExtendedReal

ExtendedReal::ExtendedReal(double value) {
  if (std::isnan(value)) {
    throw InputError("extended real: NaN is not a valid offset");
  }
  if (std::isinf(value)) {
    kind_ = value > 0 ? Kind::PlusInfinity : Kind::MinusInfinity;
  } else {
    value_ = value;
  }
}

double ExtendedReal::as_double() const {
  switch (kind_) {
    case Kind::PlusInfinity:
      return std::numeric_limits<double>::infinity();
    case Kind::MinusInfinity:
      return -std::numeric_limits<double>::infinity();
    case Kind::Finite:
      break;
  }
  return value_;
}

double ExtendedReal::value() const {
  if (!is_finite()) {
    throw InputError("extended real: value() on an infinite offset");
  }
  return value_;
}

// ---------------------------------------------------------------------------
// OrientedHyperplane / AffineFunctional / PowerDiagramSpec

OrientedHyperplane::OrientedHyperplane(std::vector<double> v, ExtendedReal a)
    : v_(std::move(v)), a_(a) {
  if (v_.empty()) {
    throw InputError("hyperplane: direction must have dimension >= 1");
  }
  double norm2 = 0.0;
  for (double c : v_) {
    if (!std::isfinite(c)) {
      throw InputError("hyperplane: direction has a non-finite entry");
    }
    norm2 += c * c;
  }
  if (std::abs(std::sqrt(norm2) - 1.0) > kUnitTolerance) {
    throw InputError("hyperplane: direction is not a unit vector");
  }
}

double AffineFunctional::operator()(std::span<const double> x) const {
  return dot(x, gradient) + offset;
}

PowerDiagramSpec::PowerDiagramSpec(std::vector<AffineFunctional> functionals)
    : functionals_(std::move(functionals)) {
  if (functionals_.empty()) {
    throw InputError("power diagram: needs at least one functional");
  }
  const std::size_t d = functionals_.front().gradient.size();
  if (d == 0) {
    throw InputError("power diagram: functionals must have dimension >= 1");
  }
  for (const auto& f : functionals_) {
    require_dim(d, f.gradient.size(), "power diagram");
    if (!std::isfinite(f.offset) ||
        !std::all_of(f.gradient.begin(), f.gradient.end(), [](double c) { return std::isfinite(c); })) {
      throw InputError("power diagram: functional has a non-finite entry");
    }
  }
  for (std::size_t i = 0; i < functionals_.size(); ++i) {
    for (std::size_t j = i + 1; j < functionals_.size(); ++j) {
      const auto& a = functionals_[i];
      const auto& b = functionals_[j];
      double dist2 = (a.offset - b.offset) * (a.offset - b.offset);
      for (std::size_t k = 0; k < d; ++k) {
        dist2 += (a.gradient[k] - b.gradient[k]) * (a.gradient[k] - b.gradient[k]);
      }
      if (std::sqrt(dist2) <= kDistinctTolerance) {
        throw InputError("power diagram: functionals " + std::to_string(i + 1) + " and " +
                         std::to_string(j + 1) + " are not pairwise distinct");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  const int r = size();
  std::vector<bool> seen(images_.size(), false);
  for (int img : images_) {
    if (img < 1 || img > r || seen[static_cast<std::size_t>(img - 1)]) {
      throw InputError("permutation: images must be a bijection on [1, " + std::to_string(r) + "]");
    }
    seen[static_cast<std::size_t>(img - 1)] = true;
  }
}

Permutation Permutation::identity(int r) {
  std::vector<int> images(static_cast<std::size_t>(r));
  std::iota(images.begin(), images.end(), 1);
  return Permutation(std::move(images));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) {
    inv[static_cast<std::size_t>(images_[i] - 1)] = static_cast<int>(i + 1);
  }
  return Permutation(std::move(inv));
}

// ---------------------------------------------------------------------------
// PartitionTree

PartitionTree::PartitionTree(std::variant<PowerLeaf, WholeLeaf, Node> body) : body_(std::move(body)) {
  if (const auto* p = std::get_if<PowerLeaf>(&body_)) {
    dim_ = p->spec.dim();
    power_cells_ = static_cast<int>(p->spec.cells());
    leaves_ = 1;
    cells_ = power_cells_;
  } else if (const auto* w = std::get_if<WholeLeaf>(&body_)) {
    dim_ = w->dim;
    max_whole_thief_ = w->thief;
    leaves_ = 1;
    cells_ = 1;
  } else {
    const auto& n = std::get<Node>(body_);
    dim_ = n.cut.dim();
    power_cells_ = std::max(n.left->power_cells_, n.right->power_cells_);
    max_whole_thief_ = std::max(n.left->max_whole_thief_, n.right->max_whole_thief_);
    leaves_ = n.left->leaves_ + n.right->leaves_;
    cells_ = n.left->cells_ + n.right->cells_;
  }
}

PartitionTree PartitionTree::leaf(PowerDiagramSpec spec) {
  return PartitionTree(PowerLeaf{std::move(spec)});
}

PartitionTree PartitionTree::whole(int thief, std::size_t dim) {
  if (thief < 1) {
    throw InputError("whole leaf: thief label must be >= 1");
  }
  if (dim == 0) {
    throw InputError("whole leaf: dimension must be >= 1");
  }
  return PartitionTree(WholeLeaf{thief, dim});
}

bool operator==(const PartitionTree& a, const PartitionTree& b) {
  if (a.body_.index() != b.body_.index()) {
    return false;
  }
  if (a.is_node()) {
    const auto& na = a.node();
    const auto& nb = b.node();
    return na.cut == nb.cut && *na.left == *nb.left && *na.right == *nb.right;
  }
  if (a.is_power_leaf()) {
    return a.power_leaf() == b.power_leaf();
  }
  return a.whole_leaf() == b.whole_leaf();
}

PartitionTree join_trees(PartitionTree left, PartitionTree right, std::vector<double> v, ExtendedReal a) {
  OrientedHyperplane cut(std::move(v), a);
  require_dim(cut.dim(), left.dim(), "join: left subtree");
  require_dim(cut.dim(), right.dim(), "join: right subtree");
  if (left.power_cells() > 0 && right.power_cells() > 0 && left.power_cells() != right.power_cells()) {
    throw InputError("join: subtrees have different leaf cell counts (" +
                     std::to_string(left.power_cells()) + " vs " + std::to_string(right.power_cells()) + ")");
  }
  const int r = std::max(left.power_cells(), right.power_cells());
  const int whole = std::max(left.max_whole_thief_, right.max_whole_thief_);
  if (r > 0 && whole > r) {
    throw InputError("join: whole-leaf thief " + std::to_string(whole) + " exceeds thief count " +
                     std::to_string(r));
  }
  return PartitionTree(PartitionTree::Node{
      std::move(cut), std::make_shared<const PartitionTree>(std::move(left)),
      std::make_shared<const PartitionTree>(std::move(right))});
}

// ---------------------------------------------------------------------------
// Membership

Side halfspace_side(const OrientedHyperplane& h, std::span<const double> x) {
  require_dim(h.dim(), x.size(), "halfspace_side");
  switch (h.a().kind()) {
    case ExtendedReal::Kind::PlusInfinity:
      return Side::Minus;
    case ExtendedReal::Kind::MinusInfinity:
      return Side::Plus;
    case ExtendedReal::Kind::Finite:
      break;
  }
  const double proj = dot(x, h.v());
  const double a = h.a().value();
  if (proj > a) return Side::Plus;
  if (proj < a) return Side::Minus;
  return Side::Boundary;
}

int power_cell_index(const PowerDiagramSpec& spec, std::span<const double> x) {
  require_dim(spec.dim(), x.size(), "power_cell_index");
  const auto& fs = spec.functionals();
  int best = 0;
  double best_value = fs[0](x);
  for (std::size_t i = 1; i < fs.size(); ++i) {
    const double value = fs[i](x);
    if (value > best_value) {
      best_value = value;
      best = static_cast<int>(i);
    }
  }
  return best + 1;
}

CellRef assign_point(const PartitionTree& tree, std::span<const double> x) {
  require_dim(tree.dim(), x.size(), "assign_point");
  const PartitionTree* at = &tree;
  int leaf_offset = 0;
  while (at->is_node()) {
    const auto& n = at->node();
    if (halfspace_side(n.cut, x) == Side::Minus) {
      leaf_offset += n.left->leaf_count();
      at = n.right.get();
    } else {
      at = n.left.get();
    }
  }
  if (at->is_whole_leaf()) {
    return CellRef{leaf_offset + 1, 1, at->whole_leaf().thief};
  }
  const int cell = power_cell_index(at->power_leaf().spec, x);
  return CellRef{leaf_offset + 1, cell, cell};
}

PartitionTree apply_symmetry(const Permutation& p, const PartitionTree& tree) {
  if (p.size() != tree.thieves()) {
    throw InputError("apply_symmetry: permutation size " + std::to_string(p.size()) +
                     " does not match thief count " + std::to_string(tree.thieves()));
  }
  if (tree.is_power_leaf()) {
    const auto& fs = tree.power_leaf().spec.functionals();
    std::vector<AffineFunctional> permuted;
    permuted.reserve(fs.size());
    for (int i = 1; i <= p.size(); ++i) {
      permuted.push_back(fs[static_cast<std::size_t>(p(i) - 1)]);
    }
    return PartitionTree::leaf(PowerDiagramSpec(std::move(permuted)));
  }
  if (tree.is_whole_leaf()) {
    return PartitionTree::whole(p.inverse()(tree.whole_leaf().thief), tree.dim());
  }
  const auto& n = tree.node();
  return join_trees(apply_symmetry(p, *n.left), apply_symmetry(p, *n.right), n.cut.v(), n.cut.a());
}

namespace {

void collect_cells(const PartitionTree& tree, int& leaf, std::vector<CellRef>& out) {
  if (tree.is_node()) {
    collect_cells(*tree.node().left, leaf, out);
    collect_cells(*tree.node().right, leaf, out);
    return;
  }
  ++leaf;
  if (tree.is_whole_leaf()) {
    out.push_back(CellRef{leaf, 1, tree.whole_leaf().thief});
    return;
  }
  for (int c = 1; c <= static_cast<int>(tree.power_leaf().spec.cells()); ++c) {
    out.push_back(CellRef{leaf, c, c});
  }
}

}  // namespace

std::vector<CellRef> cells(const PartitionTree& tree) {
  std::vector<CellRef> out;
  out.reserve(static_cast<std::size_t>(tree.cell_count()));
  int leaf = 0;
  collect_cells(tree, leaf, out);
  return out;
}

std::vector<int> labels(const PartitionTree& tree) {
  std::vector<int> out;
  for (const auto& c : cells(tree)) {
    out.push_back(c.thief);
  }
  return out;
}

// ---------------------------------------------------------------------------
// 2D clipping

namespace {

// Keeps {p : n.p + c >= 0}.
Polygon2 clip(const Polygon2& poly, double nx, double ny, double c) {
  if (poly.empty()) {
    return poly;
  }
  if (nx == 0.0 && ny == 0.0) {
    return c >= 0.0 ? poly : Polygon2{};
  }
  Polygon2 out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % n];
    const double fp = nx * p[0] + ny * p[1] + c;
    const double fq = nx * q[0] + ny * q[1] + c;
    if (fp >= 0.0) {
      out.push_back(p);
    }
    if ((fp >= 0.0) != (fq >= 0.0)) {
      const double t = fp / (fp - fq);
      out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
    }
  }
  if (out.size() < 3) {
    out.clear();
  }
  return out;
}

}  // namespace

Polygon2 cell_polytope(const PartitionTree& tree, const CellRef& cell, const Box2& box) {
  if (tree.dim() != 2) {
    throw UnsupportedDimension("cell_polytope: only d = 2 is supported, got d = " + std::to_string(tree.dim()));
  }
  if (box.empty()) {
    throw InputError("cell_polytope: bounding box is empty");
  }
  if (cell.leaf_index < 1 || cell.leaf_index > tree.leaf_count()) {
    throw InputError("cell_polytope: leaf index out of range");
  }
  Polygon2 poly{{box.xmin, box.ymin}, {box.xmax, box.ymin}, {box.xmax, box.ymax}, {box.xmin, box.ymax}};
  const PartitionTree* at = &tree;
  int leaf_offset = 0;
  while (at->is_node()) {
    const auto& n = at->node();
    const auto& v = n.cut.v();
    const ExtendedReal a = n.cut.a();
    const bool go_left = cell.leaf_index <= leaf_offset + n.left->leaf_count();
    if (go_left) {
      if (a.kind() == ExtendedReal::Kind::PlusInfinity) return {};
      if (a.is_finite()) poly = clip(poly, v[0], v[1], -a.value());
      at = n.left.get();
    } else {
      if (a.kind() == ExtendedReal::Kind::MinusInfinity) return {};
      if (a.is_finite()) poly = clip(poly, -v[0], -v[1], a.value());
      leaf_offset += n.left->leaf_count();
      at = n.right.get();
    }
  }
  if (at->is_whole_leaf()) {
    if (cell.cell_index != 1) {
      throw InputError("cell_polytope: whole leaf has a single cell");
    }
    return poly;
  }
  const auto& fs = at->power_leaf().spec.functionals();
  if (cell.cell_index < 1 || cell.cell_index > static_cast<int>(fs.size())) {
    throw InputError("cell_polytope: cell index out of range");
  }
  const auto& fi = fs[static_cast<std::size_t>(cell.cell_index - 1)];
  for (std::size_t j = 0; j < fs.size() && !poly.empty(); ++j) {
    if (static_cast<int>(j) == cell.cell_index - 1) continue;
    const auto& fj = fs[j];
    poly = clip(poly, fi.gradient[0] - fj.gradient[0], fi.gradient[1] - fj.gradient[1], fi.offset - fj.offset);
  }
  return poly;
}

double polygon_area(const Polygon2& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    twice += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * twice;
}

}  // namespace equipart
