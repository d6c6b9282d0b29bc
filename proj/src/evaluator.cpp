#include "equipart/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "equipart/error.hpp"

namespace equipart {

PointBlock::PointBlock(const MeasureSet& ms) : dim(ms.dim()) {
  for (const auto& m : ms.measures()) {
    n += m.size();
  }
  coords.assign(dim, std::vector<double>(n));
  weights.reserve(n);
  measure_begin.push_back(0);
  std::size_t k = 0;
  for (const auto& m : ms.measures()) {
    for (std::size_t p = 0; p < m.size(); ++p, ++k) {
      for (std::size_t j = 0; j < dim; ++j) {
        coords[j][k] = m.points()[p][j];
      }
      weights.push_back(m.weights()[p]);
    }
    measure_begin.push_back(k);
  }
  for (const auto& c : coords) {
    coord_ptrs.push_back(c.data());
  }
}

// ---------------------------------------------------------------------------
// FlatTree

namespace {

int flatten(const PartitionTree& t, FlatTree& out) {
  if (t.is_node()) {
    const auto& n = t.node();
    const int id = static_cast<int>(out.nodes.size());
    out.nodes.push_back(FlatTree::Node{n.cut.v(), n.cut.a().as_double(), 0, 0});
    const int left = flatten(*n.left, out);
    const int right = flatten(*n.right, out);
    out.nodes[static_cast<std::size_t>(id)].left = left;
    out.nodes[static_cast<std::size_t>(id)].right = right;
    return id;
  }
  FlatTree::Leaf leaf;
  if (t.is_whole_leaf()) {
    leaf.whole_thief = t.whole_leaf().thief;
    leaf.cells = 1;
  } else {
    const auto& fs = t.power_leaf().spec.functionals();
    leaf.cells = fs.size();
    for (const auto& f : fs) {
      leaf.grads.insert(leaf.grads.end(), f.gradient.begin(), f.gradient.end());
      leaf.offsets.push_back(f.offset);
    }
  }
  out.leaves.push_back(std::move(leaf));
  return ~static_cast<int>(out.leaves.size() - 1);
}

PartitionTree unflatten(const FlatTree& f, int link) {
  if (link >= 0) {
    const auto& n = f.nodes[static_cast<std::size_t>(link)];
    return join_trees(unflatten(f, n.left), unflatten(f, n.right), n.v, ExtendedReal(n.a));
  }
  const auto& leaf = f.leaves[static_cast<std::size_t>(~link)];
  if (leaf.whole_thief > 0) {
    return PartitionTree::whole(leaf.whole_thief, f.dim);
  }
  std::vector<AffineFunctional> fs;
  for (std::size_t i = 0; i < leaf.cells; ++i) {
    fs.push_back(AffineFunctional{
        std::vector<double>(leaf.grads.begin() + static_cast<std::ptrdiff_t>(i * f.dim),
                            leaf.grads.begin() + static_cast<std::ptrdiff_t>((i + 1) * f.dim)),
        leaf.offsets[i]});
  }
  return PartitionTree::leaf(PowerDiagramSpec(std::move(fs)));
}

}  // namespace

FlatTree::FlatTree(const PartitionTree& tree) : dim(tree.dim()), thieves(tree.thieves()) {
  root = flatten(tree, *this);
}

PartitionTree FlatTree::to_tree() const { return unflatten(*this, root); }

// ---------------------------------------------------------------------------
// TreeEvaluator

TreeEvaluator::TreeEvaluator(const PointBlock& block, const kernels::KernelTable& k)
    : block_(block), k_(k), scratch_(block.n), labels_(block.n) {}

void TreeEvaluator::evaluate_affine(const FlatTree& tree, bool leaves) {
  const std::size_t n = block_.n;
  if (tree.dim != block_.dim) {
    throw InputError("evaluator: tree dimension does not match the point dimension");
  }
  node_vals_.resize(tree.nodes.size());
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    node_vals_[i].resize(n);
    k_.affine(block_.coord_ptrs.data(), block_.dim, tree.nodes[i].v.data(), 0.0, n, node_vals_[i].data());
  }
  leaf_vals_.resize(tree.leaves.size());
  if (!leaves) return;
  for (std::size_t l = 0; l < tree.leaves.size(); ++l) {
    const auto& leaf = tree.leaves[l];
    if (leaf.whole_thief > 0) {
      continue;
    }
    leaf_vals_[l].resize(leaf.cells);
    for (std::size_t i = 0; i < leaf.cells; ++i) {
      leaf_vals_[l][i].resize(n);
      k_.affine(block_.coord_ptrs.data(), block_.dim, leaf.grads.data() + i * tree.dim, leaf.offsets[i], n,
                leaf_vals_[l][i].data());
    }
  }
}

const std::vector<int>& TreeEvaluator::hard_labels(const FlatTree& tree) {
  evaluate_affine(tree);
  for (std::size_t k = 0; k < block_.n; ++k) {
    int link = tree.root;
    while (link >= 0) {
      const auto& node = tree.nodes[static_cast<std::size_t>(link)];
      link = node_vals_[static_cast<std::size_t>(link)][k] >= node.a ? node.left : node.right;
    }
    const auto l = static_cast<std::size_t>(~link);
    const auto& leaf = tree.leaves[l];
    if (leaf.whole_thief > 0) {
      labels_[k] = leaf.whole_thief;
      continue;
    }
    std::size_t best = 0;
    double best_value = leaf_vals_[l][0][k];
    for (std::size_t i = 1; i < leaf.cells; ++i) {
      if (leaf_vals_[l][i][k] > best_value) {
        best_value = leaf_vals_[l][i][k];
        best = i;
      }
    }
    labels_[k] = static_cast<int>(best + 1);
  }
  return labels_;
}

ShareMatrix TreeEvaluator::hard_shares(const FlatTree& tree) {
  const auto& lab = hard_labels(tree);
  const std::size_t r = static_cast<std::size_t>(tree.thieves);
  ShareMatrix out(block_.measures(), r);
  for (std::size_t i = 0; i < block_.measures(); ++i) {
    for (std::size_t k = block_.measure_begin[i]; k < block_.measure_begin[i + 1]; ++k) {
      out(i, static_cast<std::size_t>(lab[k] - 1)) += block_.weights[k];
    }
  }
  return out;
}

namespace {

double gradient_spread(const FlatTree::Leaf& leaf, std::size_t dim) {
  double spread = 0.0;
  for (std::size_t i = 0; i < leaf.cells; ++i) {
    for (std::size_t j = i + 1; j < leaf.cells; ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = leaf.grads[i * dim + c] - leaf.grads[j * dim + c];
        d2 += diff * diff;
      }
      spread = std::max(spread, std::sqrt(d2));
    }
  }
  return spread > 0.0 ? spread : 1.0;
}

}  // namespace

ShareMatrix TreeEvaluator::soft_shares(const FlatTree& tree, double tau) {
  evaluate_affine(tree, false);
  const std::size_t n = block_.n;
  const std::size_t r = static_cast<std::size_t>(tree.thieves);
  const std::size_t nn = tree.nodes.size();
  reach_.resize(nn + tree.leaves.size());
  for (auto& buf : reach_) {
    buf.resize(n);
  }
  thief_prob_.resize(r);
  for (auto& buf : thief_prob_) {
    buf.assign(n, 0.0);
  }
  auto slot = [nn](int link) { return link >= 0 ? static_cast<std::size_t>(link) : nn + static_cast<std::size_t>(~link); };

  std::fill(reach_[slot(tree.root)].begin(), reach_[slot(tree.root)].end(), 1.0);
  // Nodes are stored in preorder, so parents are processed before children.
  for (std::size_t i = 0; i < nn; ++i) {
    const auto& node = tree.nodes[i];
    const std::vector<double>& here = reach_[i];
    std::vector<double>& left = reach_[slot(node.left)];
    std::vector<double>& right = reach_[slot(node.right)];
    if (std::isinf(node.a)) {
      const bool all_left = node.a < 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        left[k] = all_left ? here[k] : 0.0;
        right[k] = all_left ? 0.0 : here[k];
      }
      continue;
    }
    k_.logistic(node_vals_[i].data(), node.a, 1.0 / tau, n, scratch_.data());
    for (std::size_t k = 0; k < n; ++k) {
      left[k] = here[k] * scratch_[k];
      right[k] = here[k] - left[k];
    }
  }
  std::vector<double*> rows;
  for (std::size_t l = 0; l < tree.leaves.size(); ++l) {
    const auto& leaf = tree.leaves[l];
    const std::vector<double>& here = reach_[nn + l];
    if (leaf.whole_thief > 0) {
      auto& dst = thief_prob_[static_cast<std::size_t>(leaf.whole_thief - 1)];
      for (std::size_t k = 0; k < n; ++k) {
        dst[k] += here[k];
      }
      continue;
    }
    const double inv_temp = 1.0 / (tau * gradient_spread(leaf, tree.dim));
    auto& vals = leaf_vals_[l];
    if (leaf.cells == 2) {
      // Two-cell softmax is the logistic of the difference functional.
      vals.resize(2);
      vals[0].resize(n);
      vals[1].resize(n);
      diff_grad_.resize(tree.dim);
      for (std::size_t c = 0; c < tree.dim; ++c) diff_grad_[c] = leaf.grads[c] - leaf.grads[tree.dim + c];
      k_.affine(block_.coord_ptrs.data(), block_.dim, diff_grad_.data(), leaf.offsets[0] - leaf.offsets[1], n,
                scratch_.data());
      k_.logistic(scratch_.data(), 0.0, inv_temp, n, vals[0].data());
      for (std::size_t k = 0; k < n; ++k) vals[1][k] = 1.0 - vals[0][k];
    } else {
      vals.resize(leaf.cells);
      for (std::size_t i = 0; i < leaf.cells; ++i) {
        vals[i].resize(n);
        k_.affine(block_.coord_ptrs.data(), block_.dim, leaf.grads.data() + i * tree.dim, leaf.offsets[i], n,
                  vals[i].data());
      }
      rows.clear();
      for (auto& row : vals) {
        rows.push_back(row.data());
      }
      k_.softmax(rows.data(), leaf.cells, inv_temp, n);
    }
    for (std::size_t c = 0; c < leaf.cells; ++c) {
      auto& dst = thief_prob_[c];
      const double* q = vals[c].data();
      for (std::size_t k = 0; k < n; ++k) {
        dst[k] += here[k] * q[k];
      }
    }
  }
  ShareMatrix out(block_.measures(), r);
  for (std::size_t i = 0; i < block_.measures(); ++i) {
    for (std::size_t s = 0; s < r; ++s) {
      double acc = 0.0;
      for (std::size_t k = block_.measure_begin[i]; k < block_.measure_begin[i + 1]; ++k) {
        acc += block_.weights[k] * thief_prob_[s][k];
      }
      out(i, s) = acc;
    }
  }
  return out;
}

double TreeEvaluator::min_margin(const FlatTree& tree) {
  evaluate_affine(tree);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < block_.n; ++k) {
    int link = tree.root;
    while (link >= 0) {
      const auto& node = tree.nodes[static_cast<std::size_t>(link)];
      const double proj = node_vals_[static_cast<std::size_t>(link)][k];
      if (std::isfinite(node.a)) {
        margin = std::min(margin, std::abs(proj - node.a));
      }
      link = proj >= node.a ? node.left : node.right;
    }
    const auto l = static_cast<std::size_t>(~link);
    const auto& leaf = tree.leaves[l];
    if (leaf.whole_thief > 0) {
      continue;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < leaf.cells; ++i) {
      if (leaf_vals_[l][i][k] > leaf_vals_[l][best][k]) {
        best = i;
      }
    }
    for (std::size_t j = 0; j < leaf.cells; ++j) {
      if (j == best) continue;
      double d2 = 0.0;
      for (std::size_t c = 0; c < tree.dim; ++c) {
        const double diff = leaf.grads[best * tree.dim + c] - leaf.grads[j * tree.dim + c];
        d2 += diff * diff;
      }
      if (d2 > 0.0) {
        margin = std::min(margin, (leaf_vals_[l][best][k] - leaf_vals_[l][j][k]) / std::sqrt(d2));
      }
    }
  }
  return margin;
}

}  // namespace equipart
