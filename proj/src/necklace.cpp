#include <algorithm>
#include <map>
#include <set>

#include "equipart/error.hpp"
#include "equipart/oracles.hpp"

namespace equipart {

using nlohmann::json;

int Necklace::types() const { return static_cast<int>(std::set<int>(beads.begin(), beads.end()).size()); }

Necklace Necklace::from_string(const std::string& letters, int thieves) {
  if (letters.empty()) throw InputError("necklace: bead string is empty");
  std::set<char> distinct;
  for (char c : letters) {
    if (!std::isalpha(static_cast<unsigned char>(c))) {
      throw InputError(std::string("necklace: bead '") + c + "' is not a letter");
    }
    distinct.insert(c);
  }
  std::map<char, int> id;
  for (char c : distinct) id.emplace(c, static_cast<int>(id.size()) + 1);
  Necklace nk;
  nk.thieves = thieves;
  for (char c : letters) nk.beads.push_back(id[c]);
  return nk;
}

Necklace Necklace::from_json(const json& j, int thieves) {
  if (!j.is_array() || j.empty()) throw InputError("necklace: expected a nonempty JSON array of type ids");
  Necklace nk;
  nk.thieves = thieves;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer() || j[i].get<int>() < 1) {
      throw InputError("necklace[" + std::to_string(i) + "]: expected a positive integer type id");
    }
    nk.beads.push_back(j[i].get<int>());
  }
  return nk;
}

namespace {

// Dense type indices 0..m-1 in increasing id order.
std::vector<int> dense_types(const Necklace& nk, int& m) {
  std::map<int, int> index;
  for (int b : nk.beads) index.emplace(b, 0);
  m = 0;
  for (auto& [id, k] : index) k = m++;
  std::vector<int> out;
  for (int b : nk.beads) out.push_back(index[b]);
  return out;
}

struct LabelSearch {
  int r = 2, m = 1;
  std::vector<std::vector<int>> piece_counts;  // piece -> type -> count
  std::vector<std::vector<int>> room;          // thief -> type -> remaining
  std::vector<int> labels;

  bool assign(std::size_t piece) {
    if (piece == piece_counts.size()) return true;
    for (int s = 0; s < r; ++s) {
      bool fits = true;
      for (int t = 0; t < m && fits; ++t) fits = piece_counts[piece][static_cast<std::size_t>(t)] <= room[s][t];
      if (!fits) continue;
      for (int t = 0; t < m; ++t) room[s][t] -= piece_counts[piece][static_cast<std::size_t>(t)];
      labels[piece] = s + 1;
      if (assign(piece + 1)) return true;
      for (int t = 0; t < m; ++t) room[s][t] += piece_counts[piece][static_cast<std::size_t>(t)];
    }
    return false;
  }
};

}  // namespace

NecklaceSplit necklace_split_exact(const Necklace& nk) {
  const int r = nk.thieves;
  if (r < 2) throw InputError("necklace: need at least 2 thieves");
  if (nk.beads.empty()) throw InputError("necklace: no beads");
  int m = 0;
  const std::vector<int> type = dense_types(nk, m);
  if (nk.beads.size() > kNecklaceMaxBeads || r > kNecklaceMaxThieves || m > kNecklaceMaxTypes) {
    throw InputError("necklace: refusing instance beyond the exhaustive limits (beads <= " +
                     std::to_string(kNecklaceMaxBeads) + ", thieves <= " + std::to_string(kNecklaceMaxThieves) +
                     ", types <= " + std::to_string(kNecklaceMaxTypes) + ")");
  }
  std::vector<int> total(static_cast<std::size_t>(m), 0);
  for (int t : type) ++total[static_cast<std::size_t>(t)];
  for (int t = 0; t < m; ++t) {
    if (total[static_cast<std::size_t>(t)] % r != 0) {
      throw InputError("necklace: type " + std::to_string(t + 1) + " has " +
                       std::to_string(total[static_cast<std::size_t>(t)]) + " beads, not divisible by " +
                       std::to_string(r));
    }
  }

  const int len = static_cast<int>(type.size());
  const int max_cuts = std::min((r - 1) * m, len - 1);
  for (int k = 0; k <= max_cuts; ++k) {
    std::vector<int> cuts(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) cuts[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
      LabelSearch search;
      search.r = r;
      search.m = m;
      search.room.assign(static_cast<std::size_t>(r), std::vector<int>(static_cast<std::size_t>(m)));
      for (auto& row : search.room) {
        for (int t = 0; t < m; ++t) row[static_cast<std::size_t>(t)] = total[static_cast<std::size_t>(t)] / r;
      }
      int begin = 0;
      for (int p = 0; p <= k; ++p) {
        const int end = p < k ? cuts[static_cast<std::size_t>(p)] : len;
        std::vector<int> counts(static_cast<std::size_t>(m), 0);
        for (int b = begin; b < end; ++b) ++counts[static_cast<std::size_t>(type[static_cast<std::size_t>(b)])];
        search.piece_counts.push_back(std::move(counts));
        begin = end;
      }
      search.labels.assign(static_cast<std::size_t>(k + 1), 0);
      if (search.assign(0)) return NecklaceSplit{cuts, search.labels};
      // Next combination of k gaps out of 1..len-1.
      int i = k - 1;
      while (i >= 0 && cuts[static_cast<std::size_t>(i)] == len - k + i) --i;
      if (i < 0) break;
      ++cuts[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) cuts[static_cast<std::size_t>(j)] = cuts[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  // The necklace theorem rules this out.
  throw ResolutionError("necklace: no split with at most (r-1)m cuts found");
}

bool necklace_split_valid(const Necklace& nk, const NecklaceSplit& split) {
  const int r = nk.thieves;
  const int len = static_cast<int>(nk.beads.size());
  if (split.labels.size() != split.cuts.size() + 1) return false;
  if (static_cast<int>(split.cuts.size()) > (r - 1) * nk.types()) return false;
  for (std::size_t i = 0; i < split.cuts.size(); ++i) {
    if (split.cuts[i] < 1 || split.cuts[i] >= len) return false;
    if (i > 0 && split.cuts[i] <= split.cuts[i - 1]) return false;
  }
  std::map<int, int> total;
  std::map<std::pair<int, int>, int> got;
  std::size_t piece = 0;
  for (int b = 0; b < len; ++b) {
    if (piece < split.cuts.size() && b >= split.cuts[piece]) ++piece;
    const int s = split.labels[piece];
    if (s < 1 || s > r) return false;
    ++total[nk.beads[static_cast<std::size_t>(b)]];
    ++got[{s, nk.beads[static_cast<std::size_t>(b)]}];
  }
  for (const auto& [t, count] : total) {
    if (count % r != 0) return false;
    for (int s = 1; s <= r; ++s) {
      const auto it = got.find({s, t});
      if ((it == got.end() ? 0 : it->second) != count / r) return false;
    }
  }
  return true;
}

json necklace_split_to_json(const NecklaceSplit& s) { return {{"cuts", s.cuts}, {"labels", s.labels}}; }

}  // namespace equipart
