#pragma once

// Discrete probability measures (weighted point clouds), per-thief share
// matrices and the test map Phi.
//
// Point clouds stand in for absolutely continuous measures. Where a continuous
// measure would give zero mass to a cell boundary, a point lying exactly on a
// boundary is assigned by the tree's tie rule (H+ at nodes, lowest index at
// leaves).

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "equipart/geometry.hpp"

namespace equipart {

class Measure {
 public:
  // Weights must be strictly positive and finite; they are normalized to sum 1.
  Measure(std::string name, std::vector<Point> points, std::vector<double> weights);
  // Equal weights.
  Measure(std::string name, std::vector<Point> points);

  const std::string& name() const { return name_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return points_.front().size(); }

 private:
  std::string name_;
  std::vector<Point> points_;
  std::vector<double> weights_;
};

class MeasureSet {
 public:
  MeasureSet(std::size_t dim, std::vector<Measure> measures);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return measures_.size(); }
  const std::vector<Measure>& measures() const { return measures_; }
  const Measure& operator[](std::size_t i) const { return measures_[i]; }

 private:
  std::size_t dim_;
  std::vector<Measure> measures_;
};

/// Dense row-major real matrix.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Entry (i, s): mass of measure i received by thief s + 1.
class ShareMatrix : public RealMatrix {
 public:
  using RealMatrix::RealMatrix;
};

/// Block i, coordinate s: share(i, s) - row_sum(i) / r. Each block lies in W_r.
class DiscrepancyVector : public RealMatrix {
 public:
  using RealMatrix::RealMatrix;
};

MeasureSet load_measures(std::istream& in);
MeasureSet load_measures_file(const std::string& path);
MeasureSet measures_from_json(const nlohmann::json& j);
nlohmann::json measures_to_json(const MeasureSet& ms);

ShareMatrix thief_shares(const PartitionTree& tree, const MeasureSet& ms);
DiscrepancyVector phi(const ShareMatrix& shares);
DiscrepancyVector phi(const PartitionTree& tree, const MeasureSet& ms);
// Max |Phi| entry; 0 exactly when the partition is a fair distribution.
double discrepancy(const DiscrepancyVector& phi);
double discrepancy(const PartitionTree& tree, const MeasureSet& ms);

// {"shares": [[...]], "phi": [[...]], "discrepancy": x}
nlohmann::json share_report(const ShareMatrix& shares);

nlohmann::json matrix_to_json(const RealMatrix& m);

}  // namespace equipart
