#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "equipart/error.hpp"
#include "equipart/oracles.hpp"

namespace equipart {

using nlohmann::json;

ConfigKind parse_config_kind(const std::string& s) {
  if (s == "simplex") return ConfigKind::Simplex;
  if (s == "pentagon") return ConfigKind::Pentagon;
  if (s == "spheres") return ConfigKind::Spheres;
  throw InputError("generate: unknown kind \"" + s + "\" (expected simplex, pentagon or spheres)");
}

std::string config_kind_name(ConfigKind k) {
  switch (k) {
    case ConfigKind::Simplex:
      return "simplex";
    case ConfigKind::Pentagon:
      return "pentagon";
    case ConfigKind::Spheres:
      return "spheres";
  }
  return "unknown";
}

double triangle_depth(const Point& p, const Point& a, const Point& b, const Point& c) {
  const double orient = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  const double sign = orient >= 0.0 ? 1.0 : -1.0;
  auto edge = [&](const Point& u, const Point& v) {
    const double ex = v[0] - u[0], ey = v[1] - u[1];
    const double len = std::hypot(ex, ey);
    return sign * (ex * (p[1] - u[1]) - ey * (p[0] - u[0])) / len;
  };
  return std::min({edge(a, b), edge(b, c), edge(c, a)});
}

namespace {

using Rng = std::mt19937_64;

Point random_direction(Rng& rng, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  while (true) {
    Point v(dim);
    double norm = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm > 1e-12) {
      for (auto& x : v) x /= norm;
      return v;
    }
  }
}

std::vector<Point> ball_cloud(Rng& rng, const Point& center, double radius, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> pts;
  pts.reserve(n);
  const double dim = static_cast<double>(center.size());
  for (std::size_t k = 0; k < n; ++k) {
    Point p = random_direction(rng, center.size());
    const double rho = radius * std::pow(unit(rng), 1.0 / dim);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = center[j] + rho * p[j];
    pts.push_back(std::move(p));
  }
  return pts;
}

double diameter(const std::vector<Point>& centers) {
  double best = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < centers[i].size(); ++k) s += (centers[i][k] - centers[j][k]) * (centers[i][k] - centers[j][k]);
      best = std::max(best, std::sqrt(s));
    }
  }
  return best;
}

json points_json(const std::vector<Point>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back(p);
  return out;
}

NamedConfig make_simplex(const GenerateOptions& opt, Rng& rng) {
  const std::size_t d = opt.dim;
  std::vector<Point> centers;
  centers.emplace_back(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    Point e(d, 0.0);
    e[i] = 1.0;
    centers.push_back(std::move(e));
  }
  const double diam = diameter(centers);
  centers.emplace_back(d, 1.0 / static_cast<double>(d + 1));
  const double eps = opt.eps > 0.0 ? opt.eps : 0.01 * diam;

  std::vector<Measure> ms;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const std::string name = i + 1 < centers.size() ? "vertex_" + std::to_string(i) : "centroid";
    ms.emplace_back(name, ball_cloud(rng, centers[i], eps, opt.npoints));
  }

  // Picking one point from each vertex ball moves the simplex columns by E
  // with |E|_F <= 2 eps sqrt(d) and the base vertex by <= eps. The centroid's
  // barycentric coordinates then move by at most (eps + |E| |mu|) / (1 - |E|)
  // in the 2-norm, and all stay positive while sqrt(d) times that is below
  // 1/(d+1).
  const double dd = static_cast<double>(d);
  const double e_norm = 2.0 * eps * std::sqrt(dd);
  const double mu_norm = std::sqrt(dd) / (dd + 1.0);
  const double shift = e_norm < 1.0 ? (eps + e_norm * mu_norm) / (1.0 - e_norm) : HUGE_VAL;
  const double slack = 1.0 / (dd + 1.0) - std::sqrt(dd) * shift;

  json meta = {{"kind", "simplex"},
               {"dim", d},
               {"eps", eps},
               {"diameter", diam},
               {"npoints", opt.npoints},
               {"seed", opt.seed},
               {"centers", points_json(centers)},
               {"validation",
                {{"check", "centroid inside every simplex spanned by one point per vertex ball (sufficient bound)"},
                 {"barycentric_slack", slack},
                 {"passed", slack > 0.0}}}};
  return NamedConfig{ConfigKind::Simplex, MeasureSet(d, std::move(ms)), std::move(meta)};
}

struct PentagonFit {
  std::array<Point, 3> centers;
  double depth = -HUGE_VAL;  // min over triangles of the best stabbing depth
};

std::vector<std::array<int, 3>> vertex_triangles() {
  std::vector<std::array<int, 3>> out;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      for (int k = j + 1; k < 5; ++k) out.push_back({i, j, k});
    }
  }
  return out;
}

double pentagon_score(const std::array<Point, 3>& c, const std::vector<Point>& v, double min_gap) {
  double score = HUGE_VAL;
  for (const auto& t : vertex_triangles()) {
    double best = -HUGE_VAL;
    for (const auto& p : c) best = std::max(best, triangle_depth(p, v[t[0]], v[t[1]], v[t[2]]));
    score = std::min(score, best);
  }
  // Keep the interior clouds apart from each other.
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double gap = std::hypot(c[i][0] - c[j][0], c[i][1] - c[j][1]);
      if (gap < min_gap) score = std::min(score, gap - min_gap);
    }
  }
  return score;
}

PentagonFit fit_pentagon(Rng& rng, const std::vector<Point>& v, double min_gap) {
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  PentagonFit best;
  for (int trial = 0; trial < 4000; ++trial) {
    std::array<Point, 3> c;
    for (auto& p : c) {
      do {
        p = {box(rng), box(rng)};
      } while (std::hypot(p[0], p[1]) > 0.8);
    }
    const double s = pentagon_score(c, v, min_gap);
    if (s > best.depth) best = {c, s};
  }
  double step = 0.1;
  for (int it = 0; it < 6000; ++it) {
    std::array<Point, 3> c = best.centers;
    for (auto& p : c) {
      p[0] += step * normal(rng);
      p[1] += step * normal(rng);
    }
    const double s = pentagon_score(c, v, min_gap);
    if (s > best.depth) {
      best = {c, s};
    } else if (it % 200 == 199) {
      step *= 0.7;
    }
  }
  return best;
}

NamedConfig make_pentagon(const GenerateOptions& opt, Rng& rng) {
  if (opt.dim != 2) throw InputError("generate: the pentagon configuration lives in the plane (d = 2)");
  std::vector<Point> verts;
  for (int k = 0; k < 5; ++k) {
    const double a = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 5.0;
    verts.push_back({std::cos(a), std::sin(a)});
  }
  const double diam = diameter(verts);
  const double eps = opt.eps > 0.0 ? opt.eps : 0.01 * diam;
  const PentagonFit fit = fit_pentagon(rng, verts, 2.0 * eps);

  json triangles = json::array();
  double min_depth = HUGE_VAL;
  for (const auto& t : vertex_triangles()) {
    int stab = -1;
    double depth = -HUGE_VAL;
    for (int i = 0; i < 3; ++i) {
      const double dpt = triangle_depth(fit.centers[i], verts[t[0]], verts[t[1]], verts[t[2]]);
      if (dpt > depth) {
        depth = dpt;
        stab = i;
      }
    }
    min_depth = std::min(min_depth, depth);
    triangles.push_back({{"vertices", {t[0], t[1], t[2]}}, {"stabbed_by", stab}, {"depth", depth}});
  }
  double min_gap = HUGE_VAL;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      min_gap = std::min(min_gap, std::hypot(fit.centers[i][0] - fit.centers[j][0], fit.centers[i][1] - fit.centers[j][1]));
    }
  }
  const bool passed = min_depth > eps && min_gap > 2.0 * eps;
  if (!passed) {
    throw ResolutionError("generate: pentagon interior centers failed validation (min depth " +
                          std::to_string(min_depth) + ", eps " + std::to_string(eps) + "); refusing to emit");
  }

  std::vector<Point> centers = verts;
  for (const auto& c : fit.centers) centers.push_back(c);
  std::vector<Measure> ms;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const std::string name = i < 5 ? "vertex_" + std::to_string(i) : "interior_" + std::to_string(i - 5);
    ms.emplace_back(name, ball_cloud(rng, centers[i], eps, opt.npoints));
  }
  json meta = {{"kind", "pentagon"},
               {"dim", 2},
               {"eps", eps},
               {"diameter", diam},
               {"npoints", opt.npoints},
               {"seed", opt.seed},
               {"centers", points_json(centers)},
               {"validation",
                {{"check", "every vertex triangle contains an interior center deeper than eps"},
                 {"triangles", triangles},
                 {"min_depth", min_depth},
                 {"min_center_gap", min_gap},
                 {"passed", passed}}}};
  return NamedConfig{ConfigKind::Pentagon, MeasureSet(2, std::move(ms)), std::move(meta)};
}

NamedConfig make_spheres(const GenerateOptions& opt, Rng& rng) {
  const std::size_t d = opt.dim;
  const std::array<double, 2> radii{1.0, 2.0};
  const double eps = opt.eps > 0.0 ? opt.eps : 0.01 * 2.0 * radii[1];
  std::vector<Measure> ms;
  json circumradii = json::array();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    std::vector<Point> pts;
    double far = 0.0;
    for (std::size_t k = 0; k < opt.npoints; ++k) {
      Point p = random_direction(rng, d);
      for (auto& x : p) x *= radii[i];
      double s = 0.0;
      for (double x : p) s += x * x;
      far = std::max(far, std::sqrt(s));
      pts.push_back(std::move(p));
    }
    circumradii.push_back(far);
    ms.emplace_back("sphere_" + std::to_string(i), std::move(pts));
  }
  json meta = {{"kind", "spheres"},
               {"dim", d},
               {"eps", eps},
               {"radii", radii},
               {"npoints", opt.npoints},
               {"seed", opt.seed},
               {"thieves", opt.thieves},
               {"odd_thieves", opt.thieves % 2 == 1},
               {"validation", {{"circumradii", circumradii}}}};
  return NamedConfig{ConfigKind::Spheres, MeasureSet(d, std::move(ms)), std::move(meta)};
}

}  // namespace

NamedConfig generate(const GenerateOptions& opt) {
  if (opt.dim < 1) throw InputError("generate: dimension must be >= 1");
  if (opt.npoints < 1) throw InputError("generate: npoints must be >= 1");
  if (opt.thieves < 2) throw InputError("generate: thieves must be >= 2");
  if (!std::isfinite(opt.eps)) throw InputError("generate: eps must be finite");
  Rng rng(opt.seed);
  switch (opt.kind) {
    case ConfigKind::Simplex:
      return make_simplex(opt, rng);
    case ConfigKind::Pentagon:
      return make_pentagon(opt, rng);
    case ConfigKind::Spheres:
      return make_spheres(opt, rng);
  }
  throw InputError("generate: unknown kind");
}

json named_config_to_json(const NamedConfig& cfg) {
  json out = measures_to_json(cfg.measures);
  out["metadata"] = cfg.metadata;
  return out;
}

}  // namespace equipart
