#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "equipart/error.hpp"
#include "equipart/solver.hpp"
#include "equipart/tree_io.hpp"
#include "nelder_mead.hpp"

#include <Eigen/Dense>

namespace equipart {

using nlohmann::json;

void SolveConfig::validate() const {
  if (!(tolerance > 0.0)) throw InputError("solve config: tolerance must be > 0");
  if (restarts < 1) throw InputError("solve config: restarts must be >= 1");
  if (!(init_scale > 0.0)) throw InputError("solve config: init_scale must be > 0");
}

json config_to_json(const SolveConfig& cfg) {
  return {{"tolerance", cfg.tolerance},
          {"restarts", cfg.restarts},
          {"max_evals", cfg.max_evals},
          {"seed", cfg.seed},
          {"init_scale", cfg.init_scale}};
}

SolveConfig config_from_json(const json& j) {
  SolveConfig cfg;
  try {
    cfg.tolerance = j.value("tolerance", cfg.tolerance);
    cfg.restarts = j.value("restarts", cfg.restarts);
    cfg.max_evals = j.value("max_evals", cfg.max_evals);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.init_scale = j.value("init_scale", cfg.init_scale);
  } catch (const json::exception& e) {
    throw InputError(std::string("solve config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json result_to_json(const SolveResult& r) {
  json out = share_report(r.shares);
  out["status"] = r.status == SolveStatus::Fair ? "fair" : "best_effort";
  out["tree"] = tree_to_json(r.tree);
  out["evals_used"] = r.evals_used;
  out["restart_index"] = r.restart_index;
  out["seed"] = r.seed;
  out["params"] = r.params;
  out["margin"] = r.margin;
  out["final_temperature"] = r.final_temperature;
  out["soft_hard_gap"] = r.soft_hard_gap;
  return out;
}

namespace {

// Temperatures are in frame units.
constexpr int kStages = 10;
constexpr double kTauStart = 0.3;
constexpr double kTauEnd = 3e-4;
constexpr int kStageIterations = 25;
// An attempt whose soft residual is still this large after the smooth stages
// sits in a bad basin and is abandoned.
constexpr double kAbandonLinf = 0.05;
constexpr int kAbandonStage = 3;
constexpr std::size_t kWalkEvals = 2000;
// A restart gives up after this many attempts in a row fail to improve it.
constexpr int kMaxStaleAttempts = 6;
constexpr int kWave = 8;

struct HardScore {
  double linf = 1.0;
  double l2 = 1.0;
};

double sum_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

class Objective {
 public:
  Objective(const TreeTemplate& tmpl, const PointBlock& block)
      : tmpl_(tmpl), eval_(block), flat_(tmpl.skeleton()) {}

  // Flattened soft Phi; false on non-finite parameters.
  bool soft_residual(std::span<const double> p, double tau, std::vector<double>& out) {
    ++evals;
    if (!load(p)) return false;
    const auto ph = phi(eval_.soft_shares(flat_, tau * tmpl_.frame().scale));
    out.assign(ph.data().begin(), ph.data().end());
    return true;
  }

  HardScore hard(std::span<const double> p) {
    ++evals;
    if (!load(p)) return {HUGE_VAL, HUGE_VAL};
    const auto ph = phi(eval_.hard_shares(flat_));
    return {discrepancy(ph), sum_sq(ph.data())};
  }

  ShareMatrix hard_shares(std::span<const double> p) {
    ++evals;
    load(p);
    return eval_.hard_shares(flat_);
  }

  ShareMatrix soft_shares(std::span<const double> p, double tau) {
    ++evals;
    load(p);
    return eval_.soft_shares(flat_, tau * tmpl_.frame().scale);
  }

  double margin(std::span<const double> p) {
    ++evals;
    if (!load(p)) return 0.0;
    return eval_.min_margin(flat_) / tmpl_.frame().scale;
  }

  std::size_t evals = 0;

 private:
  bool load(std::span<const double> p) {
    for (double x : p) {
      if (!std::isfinite(x)) return false;
    }
    tmpl_.decode_into(p, flat_);
    return true;
  }

  const TreeTemplate& tmpl_;
  TreeEvaluator eval_;
  FlatTree flat_;
};

// Levenberg-Marquardt on the soft residual at a fixed temperature, with a
// forward-difference Jacobian. Returns the final residual (empty if the
// start point was not finite).
std::vector<double> levenberg_marquardt(Objective& obj, ParamVector& x, double tau, int max_iter,
                                        std::size_t eval_limit) {
  const std::size_t n = x.size();
  std::vector<double> r, rt;
  if (!obj.soft_residual(x, tau, r)) return {};
  const std::size_t m = r.size();
  double cost = sum_sq(r);
  double lambda = 1e-3;
  Eigen::MatrixXd jac(m, n);
  ParamVector xt(n);
  for (int it = 0; it < max_iter && cost > 1e-24; ++it) {
    if (obj.evals + n + 1 > eval_limit) break;
    for (std::size_t j = 0; j < n; ++j) {
      xt = x;
      const double h = 1e-3 * tau * std::max(1.0, std::abs(x[j]));
      xt[j] += h;
      obj.soft_residual(xt, tau, rt);
      for (std::size_t i = 0; i < m; ++i) jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (rt[i] - r[i]) / h;
    }
    const Eigen::Map<const Eigen::VectorXd> res(r.data(), static_cast<Eigen::Index>(m));
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * res;
    bool improved = false;
    while (!improved && lambda < 1e12 && obj.evals < eval_limit) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index k = 0; k < a.rows(); ++k) a(k, k) += lambda * (jtj(k, k) + 1e-12);
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      for (std::size_t j = 0; j < n; ++j) xt[j] = x[j] + step(static_cast<Eigen::Index>(j));
      if (obj.soft_residual(xt, tau, rt) && sum_sq(rt) < cost) {
        x = xt;
        r = rt;
        cost = sum_sq(r);
        lambda = std::max(lambda / 3.0, 1e-9);
        improved = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!improved) break;
  }
  return r;
}

struct RestartOutcome {
  ParamVector params;
  double discrepancy = HUGE_VAL;
  std::size_t evals = 0;
  int index = 0;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool shares_equal(const ShareMatrix& a, const ShareMatrix& b) { return a.data() == b.data(); }

// Pushes boundaries away from points without changing any point's thief.
ParamVector polish_margin(Objective& obj, const ParamVector& p, std::size_t budget) {
  if (budget < 2 * (p.size() + 2)) return p;
  const ShareMatrix target = obj.hard_shares(p);
  const double start = obj.margin(p);
  auto f = [&](const std::vector<double>& x) {
    if (!shares_equal(obj.hard_shares(x), target)) return HUGE_VAL;
    return -obj.margin(x);
  };
  const double step = std::max(1e-3, 4.0 * start);
  auto nm = detail::nelder_mead(f, p, step, budget / 2);
  return nm.f < -start ? nm.x : p;
}

class Restart {
 public:
  Restart(const TreeTemplate& tmpl, const PointBlock& block, const SolveConfig& cfg, int index)
      : tmpl_(tmpl), cfg_(cfg), obj_(tmpl, block),
        rng_(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1))) {
    out_.index = index;
  }

  RestartOutcome run() {
    const std::size_t budget = cfg_.max_evals;
    ParamVector x = random_start();
    best_x_ = x;
    best_ = obj_.hard(x);
    int stale = 0;
    while (best_.linf >= cfg_.tolerance && obj_.evals < budget && stale < kMaxStaleAttempts) {
      const double before = best_.l2;
      if (attempt(x)) break;
      stale = best_.l2 < before ? 0 : stale + 1;
      x = random_start();
    }
    out_.params = best_x_;
    out_.discrepancy = best_.linf;
    if (best_.linf < cfg_.tolerance && obj_.evals < budget) {
      out_.params = polish_margin(obj_, best_x_, std::min<std::size_t>(budget - obj_.evals, 80 * (x.size() + 1)));
      out_.discrepancy = obj_.hard(out_.params).linf;
    }
    out_.evals = obj_.evals;
    return out_;
  }

 private:
  ParamVector random_start() {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(-0.9, 0.9);
    ParamVector x(tmpl_.param_count());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = tmpl_.is_offset_param(i) ? uniform(rng_) : cfg_.init_scale * normal(rng_);
    }
    return x;
  }

  // Records x if it beats the best hard score; true once fair.
  bool consider(const ParamVector& x) { return record(x, obj_.hard(x)); }

  bool record(const ParamVector& x, const HardScore& h) {
    if (h.l2 < best_.l2 || (h.l2 == best_.l2 && h.linf < best_.linf)) {
      best_ = h;
      best_x_ = x;
    }
    return best_.linf < cfg_.tolerance;
  }

  // One annealed descent from x followed by a short walk on the hard
  // plateau. True once a fair point is recorded.
  bool attempt(ParamVector x) {
    const std::size_t budget = cfg_.max_evals;
    for (int stage = 0; stage < kStages && obj_.evals < budget; ++stage) {
      const double tau = kTauStart * std::pow(kTauEnd / kTauStart, static_cast<double>(stage) / (kStages - 1));
      const auto r = levenberg_marquardt(obj_, x, tau, kStageIterations, budget);
      if (r.empty() || obj_.evals >= budget) return false;
      if (consider(x)) return true;
      if (stage == kAbandonStage && max_abs(r) > kAbandonLinf) return false;
    }
    return walk(x, std::min(budget, obj_.evals + kWalkEvals));
  }

  bool walk(ParamVector cur, std::size_t limit) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution pick(0.5);
    std::uniform_int_distribution<std::size_t> any(0, cur.size() - 1);
    HardScore cur_score = obj_.hard(cur);
    double sigma = kTauEnd;
    int stall = 0;
    ParamVector cand(cur.size());
    while (obj_.evals < limit) {
      cand = cur;
      bool moved = false;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        if (pick(rng_)) {
          cand[i] += sigma * normal(rng_);
          moved = true;
        }
      }
      if (!moved) cand[any(rng_)] += sigma * normal(rng_);
      const HardScore h = obj_.hard(cand);
      if (h.l2 < cur_score.l2) {
        sigma = std::min(sigma * 1.5, 0.05);
        stall = 0;
      } else if (++stall > 40) {
        sigma = std::max(sigma * 0.7, 1e-7);
        stall = 0;
      }
      if (h.l2 <= cur_score.l2) {
        cur = cand;
        cur_score = h;
        if (record(cur, h)) return true;
      }
    }
    return false;
  }

  const TreeTemplate& tmpl_;
  const SolveConfig& cfg_;
  Objective obj_;
  std::mt19937_64 rng_;
  RestartOutcome out_;
  ParamVector best_x_;
  HardScore best_{HUGE_VAL, HUGE_VAL};
};

RestartOutcome run_restart(const TreeTemplate& tmpl, const PointBlock& block, const SolveConfig& cfg, int index) {
  return Restart(tmpl, block, cfg, index).run();
}

double max_abs_diff(const ShareMatrix& a, const ShareMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace

SolveResult solve_fair(const TreeTemplate& tmpl_in, const MeasureSet& ms, const SolveConfig& cfg) {
  cfg.validate();
  if (tmpl_in.dim() != ms.dim()) {
    throw InputError("solve: template dimension " + std::to_string(tmpl_in.dim()) +
                     " does not match measure dimension " + std::to_string(ms.dim()));
  }
  const TreeTemplate tmpl = tmpl_in.with_frame(fit_frame(ms));
  const PointBlock block(ms);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::vector<RestartOutcome> done;
  for (int wave_start = 0; wave_start < cfg.restarts; wave_start += kWave) {
    const int wave_end = std::min(cfg.restarts, wave_start + kWave);
    std::vector<RestartOutcome> wave(static_cast<std::size_t>(wave_end - wave_start));
    const int workers = std::min<int>(static_cast<int>(hw), wave_end - wave_start);
    auto work = [&](int worker) {
      for (int i = wave_start + worker; i < wave_end; i += workers) {
        wave[static_cast<std::size_t>(i - wave_start)] = run_restart(tmpl, block, cfg, i);
      }
    };
    if (workers <= 1) {
      work(0);
    } else {
      std::vector<std::thread> threads;
      for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
      for (auto& t : threads) t.join();
    }
    bool fair = false;
    for (auto& r : wave) {
      fair = fair || r.discrepancy < cfg.tolerance;
      done.push_back(std::move(r));
    }
    if (fair) break;
  }

  const auto best = std::min_element(done.begin(), done.end(), [](const RestartOutcome& a, const RestartOutcome& b) {
    return a.discrepancy != b.discrepancy ? a.discrepancy < b.discrepancy : a.index < b.index;
  });

  SolveResult result;
  result.seed = cfg.seed;
  result.restart_index = best->index;
  result.params = best->params;
  for (const auto& r : done) result.evals_used += r.evals;
  try {
    result.tree = decode(tmpl, best->params);
  } catch (const InputError&) {
    // Degenerate leaf (coincident functionals): nudge the free coordinates.
    ParamVector p = best->params;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!tmpl.is_offset_param(i)) p[i] += 1e-9 * static_cast<double>(i + 1);
    }
    result.params = p;
    result.tree = decode(tmpl, p);
  }
  result.shares = thief_shares(result.tree, ms);
  result.discrepancy = discrepancy(phi(result.shares));
  result.status = result.discrepancy < cfg.tolerance ? SolveStatus::Fair : SolveStatus::BestEffort;

  Objective obj(tmpl, block);
  result.margin = obj.margin(result.params);
  double tau = std::isfinite(result.margin) && result.margin > 0.0 ? result.margin / 16.0 : kTauEnd;
  const ShareMatrix hard = obj.hard_shares(result.params);
  double gap = max_abs_diff(obj.soft_shares(result.params, tau), hard);
  for (int i = 0; i < 40 && gap > cfg.tolerance / 10.0; ++i) {
    tau *= 0.5;
    gap = max_abs_diff(obj.soft_shares(result.params, tau), hard);
  }
  result.final_temperature = tau * tmpl.frame().scale;
  result.soft_hard_gap = gap;
  return result;
}

}  // namespace equipart
