#include "equipart/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "equipart/error.hpp"
#include "equipart/measures.hpp"
#include "equipart/oracles.hpp"
#include "equipart/render.hpp"
#include "equipart/solver.hpp"
#include "equipart/tree_io.hpp"

namespace equipart {

using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out_path;
  bool quiet = false;
};

class Output {
 public:
  Output(const Globals& g, std::ostream& out, std::ostream& err) : g_(g), out_(out), err_(err) {}

  void write(const std::string& text) const {
    if (g_.out_path.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(g_.out_path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + g_.out_path + "'");
    f << text;
    if (!f) throw InputError("error while writing '" + g_.out_path + "'");
  }
  void write_json(const json& j) const { write(j.dump(2) + "\n"); }
  void note(const std::string& msg) const {
    if (!g_.quiet) err_ << msg << "\n";
  }

 private:
  const Globals& g_;
  std::ostream& out_;
  std::ostream& err_;
};

std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

struct TemplateArgs {
  std::string file;
  int iterated = 0;
  int thieves = 2;
  std::string dirs = "auto";

  void add(CLI::App* cmd) {
    cmd->add_option("--template", file, "Template tree file (\"a\": null / \"functionals\": null mark free slots)");
    cmd->add_option("--iterated", iterated, "Shorthand: balanced tree with this many power leaves");
    cmd->add_option("--thieves", thieves, "Number of thieves r")->check(CLI::PositiveNumber);
    cmd->add_option("--dirs", dirs, "Node directions for the shorthand (only \"auto\")");
  }

  TreeTemplate build(std::size_t dim) const {
    if (!file.empty() && iterated > 0) throw InputError("give either --template or --iterated, not both");
    if (!file.empty()) {
      try {
        return TreeTemplate::from_json(read_json_file(file), dim, thieves);
      } catch (const InputError& e) {
        throw InputError(file + ": " + e.what());
      }
    }
    if (iterated < 1) throw InputError("a template is required: --template FILE or --iterated t --thieves r");
    if (dirs != "auto") throw InputError("--dirs: only \"auto\" (cyclic canonical basis) is supported");
    return TreeTemplate::balanced(dim, iterated, thieves);
  }
};

MeasureSet load_measures_arg(const std::string& path) {
  if (path.empty()) throw InputError("--measures is required");
  return load_measures_file(path);
}

int cmd_solve(const Globals& g, const Output& out, const std::string& measures_path, const TemplateArgs& targs,
              SolveConfig cfg) {
  const MeasureSet ms = load_measures_arg(measures_path);
  const TreeTemplate tmpl = targs.build(ms.dim());
  cfg.seed = g.seed;
  const SolveResult r = solve_fair(tmpl, ms, cfg);
  json j = result_to_json(r);
  j["config"] = config_to_json(cfg);
  out.write_json(j);
  const bool fair = r.status == SolveStatus::Fair;
  out.note(std::string(fair ? "fair" : "best effort") + ": discrepancy " + fmt(r.discrepancy) + " (restart " +
           std::to_string(r.restart_index) + ", " + std::to_string(r.evals_used) + " evaluations)");
  return fair ? kExitOk : kExitBestEffort;
}

int cmd_necklace(const Output& out, const std::string& beads, const std::string& beads_json, int thieves) {
  if (beads.empty() == beads_json.empty()) throw InputError("give exactly one of --beads and --beads-json");
  Necklace nk;
  if (!beads.empty()) {
    nk = Necklace::from_string(beads, thieves);
  } else {
    json j;
    try {
      j = json::parse(beads_json);
    } catch (const json::parse_error& e) {
      throw InputError(std::string("--beads-json: ") + e.what());
    }
    nk = Necklace::from_json(j, thieves);
  }
  const NecklaceSplit s = necklace_split_exact(nk);
  out.write_json(necklace_split_to_json(s));
  out.note(std::to_string(s.cuts.size()) + " cuts");
  return kExitOk;
}

int cmd_probe(const Globals& g, const Output& out, const std::string& config_path, const std::string& kind,
              const TemplateArgs& targs, std::size_t budget) {
  const MeasureSet ms = load_measures_arg(config_path);
  std::optional<TreeTemplate> tmpl;
  if (!kind.empty()) {
    if (!targs.file.empty() || targs.iterated > 0) throw InputError("give either --builtin or a template, not both");
    if (kind == "simplex") {
      tmpl = simplex_probe_template(ms.dim());
    } else if (kind == "pentagon") {
      if (ms.dim() != 2) throw InputError("--builtin pentagon needs planar measures");
      tmpl = pentagon_probe_template();
    } else {
      throw InputError("--builtin: expected simplex or pentagon");
    }
  } else {
    tmpl = targs.build(ms.dim());
  }
  const ProbeReport rep = infeasibility_probe(ms, *tmpl, budget, g.seed);
  out.write_json(probe_report_to_json(rep));
  out.note("evidence: best discrepancy " + fmt(rep.best_discrepancy) + " from " + rep.best_source + " after " +
           std::to_string(rep.attempts) + " evaluations");
  return kExitOk;
}

Box2 parse_bbox(const std::vector<double>& v) {
  if (v.size() != 4) throw InputError("--bbox expects xmin ymin xmax ymax");
  return Box2{v[0], v[1], v[2], v[3]};
}

PartitionTree load_render_tree(const std::string& path, std::size_t dim) {
  if (path.empty()) throw InputError("--tree is required");
  const json j = read_json_file(path);
  try {
    // A solve result carries the tree under "tree".
    if (j.is_object() && j.contains("tree") && !j.contains("type")) return tree_from_json(j["tree"], dim);
    return tree_from_json(j, dim);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out_stream, std::ostream& err) {
  CLI::App app{"Fair partitions of measures by iterated convex partitions"};
  app.name("equipart");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed (default 0)");
  app.add_option("--out", g.out_path, "Output file (default: standard output)");
  app.add_flag("--quiet", g.quiet, "Suppress progress messages");

  // solve
  auto* solve = app.add_subcommand("solve", "Search a template for a fair distribution");
  std::string measures_path;
  TemplateArgs targs;
  SolveConfig cfg;
  solve->add_option("--measures", measures_path, "Measure file")->required();
  targs.add(solve);
  solve->add_option("--tolerance", cfg.tolerance, "Fair when the discrepancy is below this");
  solve->add_option("--restarts", cfg.restarts, "Number of restarts");
  solve->add_option("--max-evals,--budget", cfg.max_evals, "Evaluation budget per restart");
  solve->add_option("--init-scale", cfg.init_scale, "Spread of random leaf starts");

  // necklace
  auto* necklace = app.add_subcommand("necklace", "Exact necklace split by exhaustive search");
  std::string beads, beads_json;
  int neck_thieves = 2;
  necklace->add_option("--beads", beads, "Beads as letters, e.g. AABB");
  necklace->add_option("--beads-json", beads_json, "Beads as a JSON list of type ids");
  necklace->add_option("--thieves", neck_thieves, "Number of thieves");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "Known bounds on M, M' and M''");
  int bn = 0, br = 0, bd = 0;
  bounds_cmd->add_option("--n", bn, "Number of parts")->required();
  bounds_cmd->add_option("--r", br, "Number of thieves")->required();
  bounds_cmd->add_option("--d", bd, "Dimension")->required();

  // generate
  auto* gen = app.add_subcommand("generate", "Counterexample configurations");
  GenerateOptions gopt;
  std::string kind_name;
  gen->add_option("--kind", kind_name, "simplex, pentagon or spheres")->required();
  gen->add_option("--d", gopt.dim, "Dimension (default 2)");
  gen->add_option("--r,--thieves", gopt.thieves, "Number of thieves (default 2)");
  gen->add_option("--eps", gopt.eps, "Cloud radius (default 0.01 x configuration diameter)");
  gen->add_option("--npoints", gopt.npoints, "Points per measure (default 50)");

  // probe
  auto* probe = app.add_subcommand("probe", "Gather evidence that no fair distribution exists");
  std::string probe_path, builtin;
  TemplateArgs probe_targs;
  std::size_t budget = 100000;
  probe->add_option("--config,--measures", probe_path, "Measure file (e.g. from generate)")->required();
  probe->add_option("--builtin", builtin, "Built-in template: simplex or pentagon");
  probe_targs.add(probe);
  probe->add_option("--budget", budget, "Total evaluation budget (>= 1000)");

  // render
  auto* render = app.add_subcommand("render", "Draw a planar partition as SVG");
  std::string tree_path, render_measures;
  RenderSpec spec;
  std::vector<double> bbox;
  render->add_option("--tree", tree_path, "Tree file or solve result")->required();
  render->add_option("--measures", render_measures, "Measure file")->required();
  render->add_option("--width", spec.width, "Width in pixels (>= 64)");
  render->add_option("--height", spec.height, "Height in pixels (>= 64)");
  render->add_option("--bbox", bbox, "xmin ymin xmax ymax (default: measures plus 5%)")->expected(4);
  render->add_option("--point-radius", spec.point_radius, "Radius of the heaviest point in pixels");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out_stream, err);
    return code == 0 ? kExitOk : kExitError;
  }

  const Output out(g, out_stream, err);
  try {
    if (*solve) return cmd_solve(g, out, measures_path, targs, cfg);
    if (*necklace) return cmd_necklace(out, beads, beads_json, neck_thieves);
    if (*bounds_cmd) {
      out.write_json(bounds_to_json(bounds(bn, br, bd)));
      return kExitOk;
    }
    if (*gen) {
      gopt.kind = parse_config_kind(kind_name);
      gopt.seed = g.seed;
      const NamedConfig c = generate(gopt);
      out.write_json(named_config_to_json(c));
      out.note("generated " + config_kind_name(c.kind) + " with " + std::to_string(c.measures.size()) + " measures");
      return kExitOk;
    }
    if (*probe) return cmd_probe(g, out, probe_path, builtin, probe_targs, budget);
    if (*render) {
      const MeasureSet ms = load_measures_arg(render_measures);
      const PartitionTree tree = load_render_tree(tree_path, ms.dim());
      if (ms.dim() != 2) throw UnsupportedDimension("render: only planar measures can be drawn");
      spec.bbox = bbox.empty() ? measures_bbox(ms) : parse_bbox(bbox);
      out.write(render_svg(tree, ms, spec));
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace equipart
