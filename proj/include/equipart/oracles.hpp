#pragma once

// Small-instance ground truth: necklace splitting, grid search, bound
// formulas, counterexample generators and infeasibility probes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "equipart/measures.hpp"
#include "equipart/solver.hpp"

namespace equipart {

// ---------------------------------------------------------------------------
// Necklace

struct Necklace {
  std::vector<int> beads;  // type ids in [1, m]
  int thieves = 2;

  int types() const;  // number of distinct ids present
  // Letters map to ids by sorted order of the distinct letters.
  static Necklace from_string(const std::string& letters, int thieves);
  static Necklace from_json(const nlohmann::json& j, int thieves);
};

struct NecklaceSplit {
  std::vector<int> cuts;    // increasing; cut k sits after bead cuts[k] (1-based)
  std::vector<int> labels;  // piece -> thief, cuts.size() + 1 entries
};

inline constexpr std::size_t kNecklaceMaxBeads = 24;
inline constexpr int kNecklaceMaxThieves = 3;
inline constexpr int kNecklaceMaxTypes = 4;

// First valid split by (cut count, cut positions, labels) in lexicographic
// order. Refuses necklaces beyond the limits above.
NecklaceSplit necklace_split_exact(const Necklace& nk);
// Independent recount; true iff every thief gets count/r of every type and
// the cut count is at most (r-1)m.
bool necklace_split_valid(const Necklace& nk, const NecklaceSplit& split);
nlohmann::json necklace_split_to_json(const NecklaceSplit& s);

// ---------------------------------------------------------------------------
// Bounds

struct BoundsReport {
  int n = 0, r = 0, d = 0;
  std::optional<long long> lower_M_prime;   // r prime, r | n
  std::optional<long long> lower_M_dprime;  // r = 2
  std::optional<long long> upper_M_dprime;  // always
  std::optional<long long> upper_M;         // n = 2r - 1, or (5, 2, 2)
  std::optional<long long> exact_M;         // n = r, or d = 1
  std::optional<long long> exact_M_dprime;  // where lower and upper meet
};

BoundsReport bounds(int n, int r, int d);
nlohmann::json bounds_to_json(const BoundsReport& b);
bool is_prime(int r);

// ---------------------------------------------------------------------------
// Generators

enum class ConfigKind { Simplex, Pentagon, Spheres };

struct GenerateOptions {
  ConfigKind kind = ConfigKind::Simplex;
  std::size_t dim = 2;
  int thieves = 2;
  double eps = 0.0;  // <= 0 means 0.01 * configuration diameter
  std::size_t npoints = 50;
  std::uint64_t seed = 0;
};

struct NamedConfig {
  ConfigKind kind = ConfigKind::Simplex;
  MeasureSet measures;
  nlohmann::json metadata;
};

ConfigKind parse_config_kind(const std::string& s);
std::string config_kind_name(ConfigKind k);

// Pentagon throws ResolutionError rather than emit a configuration that fails
// its stabbing check.
NamedConfig generate(const GenerateOptions& opt);
nlohmann::json named_config_to_json(const NamedConfig& cfg);

// Signed distance from p to the boundary of triangle abc (positive inside).
double triangle_depth(const Point& p, const Point& a, const Point& b, const Point& c);

// ---------------------------------------------------------------------------
// Grid search and probes

struct BruteForceResult {
  ParamVector params;  // template frame of tmpl.with_frame(fit_frame(ms))
  double discrepancy = 1.0;
  std::size_t evaluated = 0;
};

inline constexpr std::size_t kBruteForceMaxPoints = 10'000'000;

// Offsets use `grid` points on [-1, 1] including the endpoints (so the
// infinite offsets are reached); leaf coordinates use the `grid` cell
// midpoints of (-1, 1) pushed through tan(pi w / 2). Ties go to the
// lexicographically smallest grid index.
BruteForceResult brute_force_fair(const MeasureSet& ms, const TreeTemplate& tmpl, std::size_t grid);
std::vector<double> brute_force_axis(std::size_t grid, bool offset);

struct ProbeReport {
  double best_discrepancy = 1.0;
  std::string best_source;  // "solver" or "grid"
  double solver_discrepancy = 1.0;
  double grid_discrepancy = 1.0;
  std::size_t grid_resolution = 0;
  std::size_t attempts = 0;
  ParamVector params;
  PartitionTree tree = PartitionTree::whole(1, 1);
};

// Half the budget goes to solve_fair, half to the largest grid that fits.
ProbeReport infeasibility_probe(const MeasureSet& ms, const TreeTemplate& tmpl, std::size_t budget,
                                std::uint64_t seed);
nlohmann::json probe_report_to_json(const ProbeReport& p);

// Node(e_1, free, free power leaf with 2 cells, whole thief 1).
TreeTemplate simplex_probe_template(std::size_t dim);
// Node(e_1, free, Node(e_2, free, leaf, leaf), whole thief 1), r = 2.
TreeTemplate pentagon_probe_template();

}  // namespace equipart
