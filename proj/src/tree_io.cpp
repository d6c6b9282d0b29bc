#include "equipart/tree_io.hpp"

#include <fstream>

#include "equipart/error.hpp"

namespace equipart {

using nlohmann::json;

json extended_real_to_json(ExtendedReal a) {
  switch (a.kind()) {
    case ExtendedReal::Kind::PlusInfinity:
      return "+inf";
    case ExtendedReal::Kind::MinusInfinity:
      return "-inf";
    case ExtendedReal::Kind::Finite:
      break;
  }
  return a.value();
}

ExtendedReal extended_real_from_json(const json& j, const std::string& ctx) {
  if (j.is_number()) {
    return ExtendedReal(j.get<double>());
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return ExtendedReal::plus_infinity();
    if (s == "-inf") return ExtendedReal::minus_infinity();
  }
  throw InputError(ctx + ": expected a number, \"+inf\" or \"-inf\"");
}

json tree_to_json(const PartitionTree& tree) {
  if (tree.is_node()) {
    const auto& n = tree.node();
    return {{"type", "node"},
            {"v", n.cut.v()},
            {"a", extended_real_to_json(n.cut.a())},
            {"left", tree_to_json(*n.left)},
            {"right", tree_to_json(*n.right)}};
  }
  if (tree.is_whole_leaf()) {
    return {{"type", "whole"}, {"thief", tree.whole_leaf().thief}};
  }
  json fs = json::array();
  for (const auto& f : tree.power_leaf().spec.functionals()) {
    std::vector<double> row = f.gradient;
    row.push_back(f.offset);
    fs.push_back(row);
  }
  return {{"type", "leaf"}, {"functionals", fs}};
}

std::optional<std::size_t> infer_tree_dim(const json& j) {
  if (!j.is_object()) {
    return std::nullopt;
  }
  if (j.contains("v") && j["v"].is_array()) {
    return j["v"].size();
  }
  if (j.contains("functionals") && j["functionals"].is_array() && !j["functionals"].empty() &&
      j["functionals"][0].is_array() && !j["functionals"][0].empty()) {
    return j["functionals"][0].size() - 1;
  }
  for (const char* side : {"left", "right"}) {
    if (j.contains(side)) {
      if (auto d = infer_tree_dim(j[side])) {
        return d;
      }
    }
  }
  return std::nullopt;
}

namespace {

std::vector<double> number_array(const json& j, const std::string& ctx) {
  if (!j.is_array()) {
    throw InputError(ctx + ": expected an array of numbers");
  }
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) {
      throw InputError(ctx + ": expected an array of numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

PartitionTree parse(const json& j, std::size_t dim, const std::string& ctx) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw InputError(ctx + ": expected an object with a \"type\" field");
  }
  const auto type = j["type"].get<std::string>();
  try {
    if (type == "node") {
      for (const char* key : {"v", "a", "left", "right"}) {
        if (!j.contains(key)) {
          throw InputError(std::string("missing field \"") + key + "\"");
        }
      }
      auto v = number_array(j["v"], ctx + ".v");
      if (v.size() != dim) {
        throw InputError("direction has dimension " + std::to_string(v.size()) + ", expected " +
                         std::to_string(dim));
      }
      return join_trees(parse(j["left"], dim, ctx + ".left"), parse(j["right"], dim, ctx + ".right"),
                        std::move(v), extended_real_from_json(j["a"], ctx + ".a"));
    }
    if (type == "leaf") {
      if (!j.contains("functionals") || !j["functionals"].is_array()) {
        throw InputError("missing \"functionals\" array");
      }
      std::vector<AffineFunctional> fs;
      for (std::size_t i = 0; i < j["functionals"].size(); ++i) {
        auto row = number_array(j["functionals"][i], ctx + ".functionals[" + std::to_string(i) + "]");
        if (row.size() != dim + 1) {
          throw InputError("functional " + std::to_string(i) + " has " + std::to_string(row.size()) +
                           " entries, expected " + std::to_string(dim + 1));
        }
        const double offset = row.back();
        row.pop_back();
        fs.push_back(AffineFunctional{std::move(row), offset});
      }
      return PartitionTree::leaf(PowerDiagramSpec(std::move(fs)));
    }
    if (type == "whole") {
      if (!j.contains("thief") || !j["thief"].is_number_integer()) {
        throw InputError("missing integer \"thief\"");
      }
      return PartitionTree::whole(j["thief"].get<int>(), dim);
    }
  } catch (const InputError& e) {
    const std::string msg = e.what();
    // Nested errors already carry their own path.
    if (msg.rfind(ctx, 0) == 0) throw;
    throw InputError(ctx + ": " + msg);
  }
  throw InputError(ctx + ": unknown type \"" + type + "\"");
}

}  // namespace

PartitionTree tree_from_json(const json& j, std::optional<std::size_t> dim_hint) {
  auto dim = infer_tree_dim(j);
  if (!dim) dim = dim_hint;
  if (!dim || *dim == 0) {
    throw InputError("tree: cannot determine the dimension");
  }
  return parse(j, *dim, "tree");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open '" + path + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

PartitionTree load_tree_file(const std::string& path) {
  try {
    return tree_from_json(read_json_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace equipart
