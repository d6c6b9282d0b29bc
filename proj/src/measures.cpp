#include "equipart/measures.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <string>

#include "equipart/error.hpp"
#include "equipart/evaluator.hpp"

namespace equipart {

using nlohmann::json;

Measure::Measure(std::string name, std::vector<Point> points, std::vector<double> weights)
    : name_(std::move(name)), points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) {
    throw InputError("measure '" + name_ + "': needs at least one point");
  }
  if (points_.size() != weights_.size()) {
    throw InputError("measure '" + name_ + "': " + std::to_string(points_.size()) + " points but " +
                     std::to_string(weights_.size()) + " weights");
  }
  const std::size_t d = points_.front().size();
  if (d == 0) {
    throw InputError("measure '" + name_ + "': points must have dimension >= 1");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (points_[k].size() != d) {
      throw InputError("measure '" + name_ + "': point " + std::to_string(k) + " has dimension " +
                       std::to_string(points_[k].size()) + ", expected " + std::to_string(d));
    }
    for (double c : points_[k]) {
      if (!std::isfinite(c)) {
        throw InputError("measure '" + name_ + "': point " + std::to_string(k) + " has a non-finite coordinate");
      }
    }
    if (!(weights_[k] > 0.0) || !std::isfinite(weights_[k])) {
      throw InputError("measure '" + name_ + "': weight " + std::to_string(k) + " must be positive and finite");
    }
    total += weights_[k];
  }
  for (double& w : weights_) {
    w /= total;
  }
}

Measure::Measure(std::string name, std::vector<Point> points)
    : Measure(std::move(name), points, std::vector<double>(points.size(), 1.0)) {}

MeasureSet::MeasureSet(std::size_t dim, std::vector<Measure> measures) : dim_(dim), measures_(std::move(measures)) {
  if (dim_ == 0) {
    throw InputError("measure set: dimension must be >= 1");
  }
  if (measures_.empty()) {
    throw InputError("measure set: needs at least one measure");
  }
  for (const auto& m : measures_) {
    if (m.dim() != dim_) {
      throw InputError("measure set: measure '" + m.name() + "' has dimension " + std::to_string(m.dim()) +
                       ", expected " + std::to_string(dim_));
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

MeasureSet measures_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("measures")) {
    throw InputError("measure file: expected an object with \"dim\" and \"measures\"");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
    throw InputError("measure file: \"dim\" must be a positive integer");
  }
  const auto dim = static_cast<std::size_t>(j["dim"].get<long long>());
  const json& arr = j["measures"];
  if (!arr.is_array() || arr.empty()) {
    throw InputError("measure file: \"measures\" must be a non-empty array");
  }
  std::vector<Measure> measures;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string ctx = "measures[" + std::to_string(i) + "]";
    const json& m = arr[i];
    if (!m.is_object() || !m.contains("points") || !m["points"].is_array()) {
      throw InputError(ctx + ": expected an object with a \"points\" array");
    }
    std::string name = m.value("name", "mu" + std::to_string(i + 1));
    std::vector<Point> points;
    for (std::size_t k = 0; k < m["points"].size(); ++k) {
      const json& p = m["points"][k];
      const std::string pctx = ctx + ".points[" + std::to_string(k) + "]";
      if (!p.is_array()) {
        throw InputError(pctx + ": expected an array of coordinates");
      }
      if (p.size() != dim) {
        throw InputError(pctx + ": dimension " + std::to_string(p.size()) + " does not match dim " +
                         std::to_string(dim));
      }
      Point pt;
      for (const auto& c : p) {
        if (!c.is_number()) {
          throw InputError(pctx + ": coordinates must be numbers");
        }
        pt.push_back(c.get<double>());
      }
      points.push_back(std::move(pt));
    }
    std::vector<double> weights;
    if (m.contains("weights")) {
      if (!m["weights"].is_array()) {
        throw InputError(ctx + ".weights: expected an array");
      }
      for (std::size_t k = 0; k < m["weights"].size(); ++k) {
        const json& w = m["weights"][k];
        if (!w.is_number()) {
          throw InputError(ctx + ".weights[" + std::to_string(k) + "]: expected a number");
        }
        if (!(w.get<double>() > 0.0)) {
          throw InputError(ctx + ".weights[" + std::to_string(k) + "]: weights must be strictly positive");
        }
        weights.push_back(w.get<double>());
      }
    } else {
      weights.assign(points.size(), 1.0);
    }
    try {
      measures.emplace_back(std::move(name), std::move(points), std::move(weights));
    } catch (const InputError& e) {
      throw InputError(ctx + ": " + e.what());
    }
  }
  return MeasureSet(dim, std::move(measures));
}

MeasureSet load_measures(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("measure file: ") + e.what());
  }
  return measures_from_json(j);
}

MeasureSet load_measures_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open measure file '" + path + "'");
  }
  try {
    return load_measures(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

json measures_to_json(const MeasureSet& ms) {
  json out;
  out["dim"] = ms.dim();
  out["measures"] = json::array();
  for (const auto& m : ms.measures()) {
    out["measures"].push_back({{"name", m.name()}, {"points", m.points()}, {"weights", m.weights()}});
  }
  return out;
}

json matrix_to_json(const RealMatrix& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shares and Phi

ShareMatrix thief_shares(const PartitionTree& tree, const MeasureSet& ms) {
  if (tree.dim() != ms.dim()) {
    throw InputError("thief_shares: tree dimension " + std::to_string(tree.dim()) +
                     " does not match measure dimension " + std::to_string(ms.dim()));
  }
  const PointBlock block(ms);
  const FlatTree flat(tree);
  TreeEvaluator eval(block);
  return eval.hard_shares(flat);
}

DiscrepancyVector phi(const ShareMatrix& shares) {
  DiscrepancyVector out(shares.rows(), shares.cols());
  const double r = static_cast<double>(shares.cols());
  for (std::size_t i = 0; i < shares.rows(); ++i) {
    double total = 0.0;
    for (std::size_t s = 0; s < shares.cols(); ++s) {
      total += shares(i, s);
    }
    for (std::size_t s = 0; s < shares.cols(); ++s) {
      out(i, s) = shares(i, s) - total / r;
    }
  }
  return out;
}

DiscrepancyVector phi(const PartitionTree& tree, const MeasureSet& ms) { return phi(thief_shares(tree, ms)); }

double discrepancy(const DiscrepancyVector& phi) {
  double worst = 0.0;
  for (double v : phi.data()) {
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

double discrepancy(const PartitionTree& tree, const MeasureSet& ms) { return discrepancy(phi(tree, ms)); }

json share_report(const ShareMatrix& shares) {
  const DiscrepancyVector p = phi(shares);
  return {{"shares", matrix_to_json(shares)}, {"phi", matrix_to_json(p)}, {"discrepancy", discrepancy(p)}};
}

}  // namespace equipart
