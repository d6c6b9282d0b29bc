#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "equipart/error.hpp"
#include "equipart/solver.hpp"
#include "equipart/tree_io.hpp"

namespace equipart {

using nlohmann::json;

namespace {

struct Builder {
  FlatTree tree;
  std::vector<bool> node_free;
  std::vector<bool> leaf_free;
  int power_cells = 0;
  int max_whole = 0;

  void note_cells(int cells, const std::string& ctx) {
    if (power_cells != 0 && power_cells != cells) {
      throw InputError(ctx + ": power leaves must all have the same cell count (" + std::to_string(power_cells) +
                       " vs " + std::to_string(cells) + ")");
    }
    power_cells = cells;
  }

  int add_leaf(FlatTree::Leaf leaf, bool free) {
    tree.leaves.push_back(std::move(leaf));
    leaf_free.push_back(free);
    return ~static_cast<int>(tree.leaves.size() - 1);
  }

  int parse(const json& j, int thieves, const std::string& ctx) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
      throw InputError(ctx + ": expected an object with a \"type\" field");
    }
    const auto type = j["type"].get<std::string>();
    const std::size_t d = tree.dim;
    if (type == "node") {
      if (!j.contains("v") || !j.contains("left") || !j.contains("right")) {
        throw InputError(ctx + ": node needs \"v\", \"left\" and \"right\"");
      }
      std::vector<double> v;
      for (const auto& c : j["v"]) {
        if (!c.is_number()) throw InputError(ctx + ".v: expected numbers");
        v.push_back(c.get<double>());
      }
      if (v.size() != d) {
        throw InputError(ctx + ".v: dimension " + std::to_string(v.size()) + ", expected " + std::to_string(d));
      }
      // Validates the unit norm.
      OrientedHyperplane check(v, 0.0);
      const bool free = !j.contains("a") || j["a"].is_null();
      const double a = free ? 0.0 : extended_real_from_json(j["a"], ctx + ".a").as_double();
      const int id = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(FlatTree::Node{std::move(v), a, 0, 0});
      node_free.push_back(free);
      const int left = parse(j["left"], thieves, ctx + ".left");
      const int right = parse(j["right"], thieves, ctx + ".right");
      tree.nodes[static_cast<std::size_t>(id)].left = left;
      tree.nodes[static_cast<std::size_t>(id)].right = right;
      return id;
    }
    if (type == "whole") {
      if (!j.contains("thief") || !j["thief"].is_number_integer() || j["thief"].get<int>() < 1) {
        throw InputError(ctx + ": whole leaf needs a positive integer \"thief\"");
      }
      FlatTree::Leaf leaf;
      leaf.whole_thief = j["thief"].get<int>();
      max_whole = std::max(max_whole, leaf.whole_thief);
      return add_leaf(std::move(leaf), false);
    }
    if (type == "leaf") {
      if (!j.contains("functionals") || j["functionals"].is_null()) {
        const int cells = j.contains("cells") ? j["cells"].get<int>() : thieves;
        if (cells < 1) {
          throw InputError(ctx + ": free leaf needs a cell count (\"cells\" or the thief count)");
        }
        note_cells(cells, ctx);
        FlatTree::Leaf leaf;
        leaf.cells = static_cast<std::size_t>(cells);
        leaf.grads.assign(leaf.cells * d, 0.0);
        leaf.offsets.assign(leaf.cells, 0.0);
        return add_leaf(std::move(leaf), true);
      }
      json wrapped = j;
      const PartitionTree fixed = tree_from_json(wrapped, d);
      FlatTree flat(fixed);
      note_cells(static_cast<int>(flat.leaves[0].cells), ctx);
      return add_leaf(std::move(flat.leaves[0]), false);
    }
    throw InputError(ctx + ": unknown type \"" + type + "\"");
  }

  void finish(const std::string& ctx) {
    tree.thieves = power_cells > 0 ? power_cells : max_whole;
    if (power_cells > 0 && max_whole > power_cells) {
      throw InputError(ctx + ": whole-leaf thief exceeds the thief count");
    }
    if (tree.thieves < 1) {
      throw InputError(ctx + ": cannot determine the thief count");
    }
  }
};

int build_balanced(Builder& b, int t, int r, int& preorder) {
  if (t == 1) {
    FlatTree::Leaf leaf;
    leaf.cells = static_cast<std::size_t>(r);
    leaf.grads.assign(leaf.cells * b.tree.dim, 0.0);
    leaf.offsets.assign(leaf.cells, 0.0);
    return b.add_leaf(std::move(leaf), true);
  }
  std::vector<double> v(b.tree.dim, 0.0);
  v[static_cast<std::size_t>(preorder) % b.tree.dim] = 1.0;
  ++preorder;
  const int id = static_cast<int>(b.tree.nodes.size());
  b.tree.nodes.push_back(FlatTree::Node{std::move(v), 0.0, 0, 0});
  b.node_free.push_back(true);
  const int left = build_balanced(b, (t + 1) / 2, r, preorder);
  const int right = build_balanced(b, t / 2, r, preorder);
  b.tree.nodes[static_cast<std::size_t>(id)].left = left;
  b.tree.nodes[static_cast<std::size_t>(id)].right = right;
  return id;
}

json skeleton_json(const FlatTree& t, const std::vector<std::size_t>& free_nodes,
                   const std::vector<std::size_t>& free_leaves, int link) {
  if (link >= 0) {
    const auto id = static_cast<std::size_t>(link);
    const auto& n = t.nodes[id];
    const bool free = std::find(free_nodes.begin(), free_nodes.end(), id) != free_nodes.end();
    return {{"type", "node"},
            {"v", n.v},
            {"a", free ? json(nullptr) : extended_real_to_json(ExtendedReal(n.a))},
            {"left", skeleton_json(t, free_nodes, free_leaves, n.left)},
            {"right", skeleton_json(t, free_nodes, free_leaves, n.right)}};
  }
  const auto id = static_cast<std::size_t>(~link);
  const auto& leaf = t.leaves[id];
  if (leaf.whole_thief > 0) {
    return {{"type", "whole"}, {"thief", leaf.whole_thief}};
  }
  if (std::find(free_leaves.begin(), free_leaves.end(), id) != free_leaves.end()) {
    return {{"type", "leaf"}, {"functionals", nullptr}, {"cells", leaf.cells}};
  }
  json fs = json::array();
  for (std::size_t i = 0; i < leaf.cells; ++i) {
    std::vector<double> row(leaf.grads.begin() + static_cast<std::ptrdiff_t>(i * t.dim),
                            leaf.grads.begin() + static_cast<std::ptrdiff_t>((i + 1) * t.dim));
    row.push_back(leaf.offsets[i]);
    fs.push_back(row);
  }
  return {{"type", "leaf"}, {"functionals", fs}};
}

double center_dot(const Frame& f, std::span<const double> v) {
  return f.center.empty() ? 0.0 : dot(f.center, v);
}

}  // namespace

Frame fit_frame(const MeasureSet& ms) {
  const std::size_t d = ms.dim();
  Frame f;
  f.center.assign(d, 0.0);
  for (const auto& m : ms.measures()) {
    for (std::size_t k = 0; k < m.size(); ++k) {
      for (std::size_t j = 0; j < d; ++j) {
        f.center[j] += m.weights()[k] * m.points()[k][j] / static_cast<double>(ms.size());
      }
    }
  }
  double var = 0.0;
  for (const auto& m : ms.measures()) {
    for (std::size_t k = 0; k < m.size(); ++k) {
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = m.points()[k][j] - f.center[j];
        var += m.weights()[k] * diff * diff / static_cast<double>(ms.size());
      }
    }
  }
  f.scale = var > 0.0 ? std::sqrt(var) : 1.0;
  return f;
}

TreeTemplate TreeTemplate::from_json(const json& j, std::size_t dim, int thieves) {
  if (dim == 0) {
    throw InputError("template: dimension must be >= 1");
  }
  Builder b;
  b.tree.dim = dim;
  b.tree.root = b.parse(j, thieves, "template");
  b.finish("template");
  TreeTemplate t;
  t.skeleton_ = std::move(b.tree);
  for (std::size_t i = 0; i < b.node_free.size(); ++i) {
    if (b.node_free[i]) t.free_nodes_.push_back(i);
  }
  for (std::size_t i = 0; i < b.leaf_free.size(); ++i) {
    if (b.leaf_free[i]) t.free_leaves_.push_back(i);
  }
  t.param_count_ = t.free_nodes_.size();
  for (std::size_t l : t.free_leaves_) {
    t.param_count_ += (t.skeleton_.leaves[l].cells - 1) * (dim + 1);
  }
  return t;
}

TreeTemplate TreeTemplate::balanced(std::size_t dim, int t, int r) {
  if (dim == 0 || t < 1 || r < 1) {
    throw InputError("template shorthand: need d >= 1, t >= 1, r >= 1");
  }
  Builder b;
  b.tree.dim = dim;
  int preorder = 0;
  b.tree.root = build_balanced(b, t, r, preorder);
  b.power_cells = r;
  b.finish("template");
  TreeTemplate out;
  out.skeleton_ = std::move(b.tree);
  for (std::size_t i = 0; i < out.skeleton_.nodes.size(); ++i) out.free_nodes_.push_back(i);
  for (std::size_t i = 0; i < out.skeleton_.leaves.size(); ++i) out.free_leaves_.push_back(i);
  out.param_count_ = out.free_nodes_.size() + out.free_leaves_.size() * static_cast<std::size_t>(r - 1) * (dim + 1);
  return out;
}

TreeTemplate TreeTemplate::from_tree(const PartitionTree& tree) {
  json j = tree_to_json(tree);
  // Blank every offset and power leaf.
  std::function<void(json&)> blank = [&](json& n) {
    const auto type = n["type"].get<std::string>();
    if (type == "node") {
      n["a"] = nullptr;
      blank(n["left"]);
      blank(n["right"]);
    } else if (type == "leaf") {
      n["cells"] = n["functionals"].size();
      n["functionals"] = nullptr;
    }
  };
  blank(j);
  return from_json(j, tree.dim(), tree.thieves());
}

json TreeTemplate::to_json() const { return skeleton_json(skeleton_, free_nodes_, free_leaves_, skeleton_.root); }

TreeTemplate TreeTemplate::with_frame(Frame frame) const {
  if (!frame.center.empty() && frame.center.size() != dim()) {
    throw InputError("template frame: center dimension mismatch");
  }
  if (!(frame.scale > 0.0) || !std::isfinite(frame.scale)) {
    throw InputError("template frame: scale must be positive and finite");
  }
  TreeTemplate t = *this;
  t.frame_ = std::move(frame);
  return t;
}

double decode_offset(double u) {
  if (u <= -1.0) return -std::numeric_limits<double>::infinity();
  if (u >= 1.0) return std::numeric_limits<double>::infinity();
  return std::tan(std::numbers::pi * u / 2.0);
}

double encode_offset(double a) {
  if (std::isinf(a)) return a > 0 ? 1.0 : -1.0;
  return 2.0 / std::numbers::pi * std::atan(a);
}

void TreeTemplate::decode_into(std::span<const double> p, FlatTree& out) const {
  const std::size_t d = dim();
  const double s = frame_.scale;
  std::size_t i = 0;
  for (std::size_t id : free_nodes_) {
    auto& node = out.nodes[id];
    const double a = decode_offset(p[i++]);
    node.a = std::isinf(a) ? a : s * a + center_dot(frame_, node.v);
  }
  for (std::size_t id : free_leaves_) {
    auto& leaf = out.leaves[id];
    for (std::size_t c = 0; c + 1 < leaf.cells; ++c) {
      double* g = leaf.grads.data() + c * d;
      double shift = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        g[j] = p[i++] / s;
        if (!frame_.center.empty()) shift += g[j] * frame_.center[j];
      }
      leaf.offsets[c] = p[i++] - shift;
    }
    const std::size_t last = leaf.cells - 1;
    std::fill(leaf.grads.begin() + static_cast<std::ptrdiff_t>(last * d), leaf.grads.end(), 0.0);
    leaf.offsets[last] = 0.0;
  }
}

PartitionTree decode(const TreeTemplate& tmpl, std::span<const double> p) {
  if (p.size() != tmpl.param_count()) {
    throw InputError("decode: parameter vector has length " + std::to_string(p.size()) + ", template expects " +
                     std::to_string(tmpl.param_count()));
  }
  for (double x : p) {
    if (!std::isfinite(x)) {
      throw InputError("decode: non-finite parameter value");
    }
  }
  FlatTree flat = tmpl.skeleton();
  tmpl.decode_into(p, flat);
  return flat.to_tree();
}

ParamVector TreeTemplate::encode(const PartitionTree& tree) const {
  const FlatTree flat(tree);
  if (flat.nodes.size() != skeleton_.nodes.size() || flat.leaves.size() != skeleton_.leaves.size() ||
      flat.dim != dim()) {
    throw InputError("encode: tree shape does not match the template");
  }
  const std::size_t d = dim();
  const double s = frame_.scale;
  ParamVector p;
  p.reserve(param_count_);
  for (std::size_t id : free_nodes_) {
    const auto& node = flat.nodes[id];
    const double a = std::isinf(node.a) ? node.a : (node.a - center_dot(frame_, node.v)) / s;
    p.push_back(encode_offset(a));
  }
  for (std::size_t id : free_leaves_) {
    const auto& leaf = flat.leaves[id];
    if (leaf.whole_thief > 0 || leaf.cells != skeleton_.leaves[id].cells) {
      throw InputError("encode: leaf " + std::to_string(id + 1) + " does not match the template");
    }
    const std::size_t last = leaf.cells - 1;
    for (std::size_t c = 0; c < last; ++c) {
      double shift = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double g = leaf.grads[c * d + j] - leaf.grads[last * d + j];
        p.push_back(g * s);
        if (!frame_.center.empty()) shift += g * frame_.center[j];
      }
      p.push_back(leaf.offsets[c] - leaf.offsets[last] + shift);
    }
  }
  return p;
}

}  // namespace equipart
