#pragma once

// Partition-tree file format (recursive JSON):
//   node:  {"type":"node","v":[...],"a":<number|"+inf"|"-inf">,"left":...,"right":...}
//   leaf:  {"type":"leaf","functionals":[[g_1,...,g_d,offset],...]}
//   whole: {"type":"whole","thief":s}   single cell handed to thief s

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "equipart/geometry.hpp"

namespace equipart {

nlohmann::json extended_real_to_json(ExtendedReal a);
ExtendedReal extended_real_from_json(const nlohmann::json& j, const std::string& ctx);

nlohmann::json tree_to_json(const PartitionTree& tree);
// `dim_hint` is required only when the tree has no node or power leaf to
// infer the dimension from.
PartitionTree tree_from_json(const nlohmann::json& j, std::optional<std::size_t> dim_hint = std::nullopt);
PartitionTree load_tree_file(const std::string& path);

// First dimension found in a node direction or leaf functional, if any.
std::optional<std::size_t> infer_tree_dim(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);

}  // namespace equipart
