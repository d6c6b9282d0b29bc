#include "equipart/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "equipart/error.hpp"

namespace equipart {

void RenderSpec::validate() const {
  if (bbox.empty()) throw InputError("render: bounding box is empty");
  if (width < 64 || height < 64) throw InputError("render: width and height must be >= 64 pixels");
  if (palette.empty()) throw InputError("render: palette is empty");
  if (!(point_radius >= 0.0) || !(stroke_width >= 0.0)) throw InputError("render: radii must be >= 0");
}

Box2 measures_bbox(const MeasureSet& ms, double pad) {
  if (ms.dim() != 2) throw UnsupportedDimension("render: only planar measures can be drawn");
  Box2 b{HUGE_VAL, HUGE_VAL, -HUGE_VAL, -HUGE_VAL};
  for (const auto& m : ms.measures()) {
    for (const auto& p : m.points()) {
      b.xmin = std::min(b.xmin, p[0]);
      b.xmax = std::max(b.xmax, p[0]);
      b.ymin = std::min(b.ymin, p[1]);
      b.ymax = std::max(b.ymax, p[1]);
    }
  }
  const double side = std::max({b.xmax - b.xmin, b.ymax - b.ymin, 1e-9});
  b.xmin -= pad * side;
  b.xmax += pad * side;
  b.ymin -= pad * side;
  b.ymax += pad * side;
  return b;
}

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  // Avoid "-0.000".
  return std::string(buf) == "-0.000" ? "0.000" : buf;
}

}  // namespace

std::string render_svg(const PartitionTree& tree, const MeasureSet& ms, const RenderSpec& spec) {
  if (tree.dim() != 2 || ms.dim() != 2) throw UnsupportedDimension("render: only d = 2 is supported");
  spec.validate();
  const Box2& b = spec.bbox;
  const double sx = spec.width / (b.xmax - b.xmin);
  const double sy = spec.height / (b.ymax - b.ymin);
  auto px = [&](double x) { return num((x - b.xmin) * sx); };
  auto py = [&](double y) { return num((b.ymax - y) * sy); };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(spec.width) +
         "\" height=\"" + std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
         std::to_string(spec.height) + "\">\n";
  out += "<g id=\"cells\" stroke=\"#333333\" stroke-width=\"" + num(spec.stroke_width) + "\">\n";
  for (const auto& cell : cells(tree)) {
    const Polygon2 poly = cell_polytope(tree, cell, b);
    if (poly.size() < 3 || polygon_area(poly) <= 0.0) continue;
    const std::string& color = spec.palette[static_cast<std::size_t>(cell.thief - 1) % spec.palette.size()];
    out += "<polygon class=\"thief-" + std::to_string(cell.thief) + "\" fill=\"" + color + "\" fill-opacity=\"0.55\" points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if (i) out += ' ';
      out += px(poly[i][0]) + "," + py(poly[i][1]);
    }
    out += "\"/>\n";
  }
  out += "</g>\n";

  double wmax = 0.0;
  for (const auto& m : ms.measures()) {
    for (double w : m.weights()) wmax = std::max(wmax, w);
  }
  out += "<g id=\"points\" fill=\"#111111\">\n";
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto& m = ms[i];
    out += "<g class=\"measure-" + std::to_string(i + 1) + "\">\n";
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double r = spec.point_radius * std::sqrt(m.weights()[k] / wmax);
      out += "<circle cx=\"" + px(m.points()[k][0]) + "\" cy=\"" + py(m.points()[k][1]) + "\" r=\"" + num(r) + "\"/>\n";
    }
    out += "</g>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace equipart
