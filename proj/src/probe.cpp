#include <cmath>
#include <numbers>

#include "equipart/error.hpp"
#include "equipart/oracles.hpp"
#include "equipart/tree_io.hpp"

namespace equipart {

using nlohmann::json;

std::vector<double> brute_force_axis(std::size_t grid, bool offset) {
  std::vector<double> out(grid);
  const double g = static_cast<double>(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    const double kk = static_cast<double>(k);
    if (offset) {
      out[k] = grid == 1 ? 0.0 : -1.0 + 2.0 * kk / (g - 1.0);
    } else {
      out[k] = std::tan(std::numbers::pi / 2.0 * (-1.0 + (2.0 * kk + 1.0) / g));
    }
  }
  return out;
}

namespace {

// grid^p, or 0 when it exceeds `cap`.
std::size_t grid_size(std::size_t grid, std::size_t p, std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < p; ++i) {
    if (grid != 0 && total > cap / grid) return 0;
    total *= grid;
  }
  return total <= cap ? total : 0;
}

}  // namespace

BruteForceResult brute_force_fair(const MeasureSet& ms, const TreeTemplate& tmpl_in, std::size_t grid) {
  if (tmpl_in.dim() != ms.dim()) throw InputError("brute_force_fair: template and measure dimensions differ");
  if (grid < 2) throw InputError("brute_force_fair: grid resolution must be >= 2");
  const TreeTemplate tmpl = tmpl_in.with_frame(fit_frame(ms));
  const std::size_t p = tmpl.param_count();
  const std::size_t total = grid_size(grid, p, kBruteForceMaxPoints);
  if (total == 0) {
    throw InputError("brute_force_fair: refusing grid of " + std::to_string(grid) + "^" + std::to_string(p) +
                     " points (limit " + std::to_string(kBruteForceMaxPoints) + ")");
  }
  const auto offsets = brute_force_axis(grid, true);
  const auto coords = brute_force_axis(grid, false);
  const PointBlock block(ms);
  TreeEvaluator eval(block);
  FlatTree flat = tmpl.skeleton();

  BruteForceResult best;
  best.discrepancy = HUGE_VAL;
  std::vector<std::size_t> idx(p, 0);
  ParamVector x(p);
  for (std::size_t n = 0; n < total; ++n) {
    for (std::size_t i = 0; i < p; ++i) x[i] = tmpl.is_offset_param(i) ? offsets[idx[i]] : coords[idx[i]];
    tmpl.decode_into(x, flat);
    const double disc = discrepancy(phi(eval.hard_shares(flat)));
    // Strict improvement keeps the lexicographically first minimizer.
    if (disc < best.discrepancy) {
      best.discrepancy = disc;
      best.params = x;
    }
    for (std::size_t i = p; i-- > 0;) {
      if (++idx[i] < grid) break;
      idx[i] = 0;
    }
  }
  best.evaluated = total;
  return best;
}

ProbeReport infeasibility_probe(const MeasureSet& ms, const TreeTemplate& tmpl_in, std::size_t budget,
                                std::uint64_t seed) {
  if (budget < 1000) throw InputError("infeasibility_probe: budget must be >= 1000 evaluations");
  const TreeTemplate tmpl = tmpl_in.with_frame(fit_frame(ms));
  const std::size_t half = budget / 2;

  SolveConfig cfg;
  cfg.restarts = 8;
  cfg.max_evals = half / static_cast<std::size_t>(cfg.restarts);
  cfg.seed = seed;
  const SolveResult solved = solve_fair(tmpl, ms, cfg);

  ProbeReport rep;
  rep.solver_discrepancy = solved.discrepancy;
  rep.attempts = solved.evals_used;
  rep.best_discrepancy = solved.discrepancy;
  rep.best_source = "solver";
  rep.params = solved.params;

  std::size_t grid = 1;
  while (grid_size(grid + 1, tmpl.param_count(), std::min(half, kBruteForceMaxPoints)) != 0) ++grid;
  if (grid >= 2) {
    const BruteForceResult bf = brute_force_fair(ms, tmpl, grid);
    rep.grid_resolution = grid;
    rep.grid_discrepancy = bf.discrepancy;
    rep.attempts += bf.evaluated;
    if (bf.discrepancy < rep.best_discrepancy) {
      rep.best_discrepancy = bf.discrepancy;
      rep.best_source = "grid";
      rep.params = bf.params;
    }
  }
  rep.tree = decode(tmpl, rep.params);
  rep.best_discrepancy = discrepancy(rep.tree, ms);
  return rep;
}

json probe_report_to_json(const ProbeReport& p) {
  return {{"label", "evidence"},
          {"note", "sampling evidence only; a positive minimum does not prove that no fair partition exists"},
          {"best_discrepancy", p.best_discrepancy},
          {"best_source", p.best_source},
          {"solver_discrepancy", p.solver_discrepancy},
          {"grid_discrepancy", p.grid_resolution ? json(p.grid_discrepancy) : json(nullptr)},
          {"grid_resolution", p.grid_resolution},
          {"attempts", p.attempts},
          {"params", p.params},
          {"tree", tree_to_json(p.tree)}};
}

TreeTemplate simplex_probe_template(std::size_t dim) {
  std::vector<double> e1(dim, 0.0);
  e1[0] = 1.0;
  const json j = {{"type", "node"},
                  {"v", e1},
                  {"a", nullptr},
                  {"left", {{"type", "leaf"}, {"functionals", nullptr}, {"cells", 2}}},
                  {"right", {{"type", "whole"}, {"thief", 1}}}};
  return TreeTemplate::from_json(j, dim, 2);
}

TreeTemplate pentagon_probe_template() {
  const json leaf = {{"type", "leaf"}, {"functionals", nullptr}, {"cells", 2}};
  const json j = {{"type", "node"},
                  {"v", {1.0, 0.0}},
                  {"a", nullptr},
                  {"left", {{"type", "node"}, {"v", {0.0, 1.0}}, {"a", nullptr}, {"left", leaf}, {"right", leaf}}},
                  {"right", {{"type", "whole"}, {"thief", 1}}}};
  return TreeTemplate::from_json(j, 2, 2);
}

}  // namespace equipart
