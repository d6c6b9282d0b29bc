#pragma once

// Batch evaluation of partition trees over every point of a MeasureSet.
//
// FlatTree is an array form of PartitionTree whose numeric slots can be
// rewritten in place (the solver decodes parameters straight into it).
// PointBlock stores all points structure-of-arrays so the kernels can stream
// them. Hard evaluation reproduces assign_point bit-for-bit.

#include <cstddef>
#include <vector>

#include "equipart/geometry.hpp"
#include "equipart/kernels.hpp"
#include "equipart/measures.hpp"

namespace equipart {

struct PointBlock {
  std::size_t dim = 0;
  std::size_t n = 0;
  std::vector<std::vector<double>> coords;  // coords[j][k]
  std::vector<const double*> coord_ptrs;
  std::vector<double> weights;              // normalized within each measure
  std::vector<std::size_t> measure_begin;   // measure i owns [begin[i], begin[i+1])

  explicit PointBlock(const MeasureSet& ms);
  std::size_t measures() const { return measure_begin.size() - 1; }
};

class FlatTree {
 public:
  // Child links: >= 0 is a node index, < 0 encodes leaf ~link.
  struct Node {
    std::vector<double> v;
    double a = 0.0;  // +-inf allowed
    int left = 0;
    int right = 0;
  };
  struct Leaf {
    int whole_thief = 0;         // > 0 for a whole leaf
    std::size_t cells = 1;
    std::vector<double> grads;   // cells * dim, row per functional
    std::vector<double> offsets; // cells
  };

  FlatTree() = default;
  explicit FlatTree(const PartitionTree& tree);

  // Rebuilds a validated PartitionTree (throws InputError on invalid slots).
  PartitionTree to_tree() const;

  std::size_t dim = 0;
  int thieves = 0;
  int root = -1;
  std::vector<Node> nodes;
  std::vector<Leaf> leaves;
};

class TreeEvaluator {
 public:
  TreeEvaluator(const PointBlock& block, const kernels::KernelTable& k = kernels::active());

  // Thief label (1-based) of every point.
  const std::vector<int>& hard_labels(const FlatTree& tree);
  ShareMatrix hard_shares(const FlatTree& tree);
  // Soft assignment: logistic at nodes with temperature tau (distance units),
  // softmax at leaves with temperature tau * (max pairwise gradient gap).
  ShareMatrix soft_shares(const FlatTree& tree, double tau);
  // Smallest distance of any point to a boundary that decides its cell.
  double min_margin(const FlatTree& tree);

  const PointBlock& block() const { return block_; }

 private:
  void evaluate_affine(const FlatTree& tree, bool leaves = true);

  const PointBlock& block_;
  const kernels::KernelTable& k_;
  std::vector<std::vector<double>> node_vals_;
  std::vector<std::vector<std::vector<double>>> leaf_vals_;
  std::vector<std::vector<double>> reach_;
  std::vector<std::vector<double>> thief_prob_;
  std::vector<double> scratch_;
  std::vector<double> diff_grad_;
  std::vector<int> labels_;
};

}  // namespace equipart
