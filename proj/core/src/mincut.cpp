#include <algorithm>
#include <stdexcept>

#include "advcongest/protocols.hpp"

namespace advcongest {

namespace {

struct HittingSearch {
  std::vector<std::vector<EdgeKey>> paths;
  std::vector<EdgeKey> chosen;

  bool hit(const std::vector<EdgeKey>& p) const {
    for (auto e : chosen)
      if (std::binary_search(p.begin(), p.end(), e)) return true;
    return false;
  }

  // Lower bound: greedily pack unhit paths that share no edge.
  std::size_t packing_bound() const {
    std::vector<EdgeKey> used;
    std::size_t count = 0;
    for (const auto& p : paths) {
      if (hit(p)) continue;
      bool disjoint = std::none_of(p.begin(), p.end(),
                                   [&](EdgeKey e) { return std::find(used.begin(), used.end(), e) != used.end(); });
      if (!disjoint) continue;
      ++count;
      used.insert(used.end(), p.begin(), p.end());
    }
    return count;
  }

  // True iff at most `budget` more edges can meet every path.
  bool feasible(std::size_t budget) {
    const std::vector<EdgeKey>* pick = nullptr;
    for (const auto& p : paths) {
      if (hit(p)) continue;
      if (!pick || p.size() < pick->size()) pick = &p;
    }
    if (!pick) return true;
    if (budget == 0 || pick->empty()) return false;
    if (packing_bound() > budget) return false;
    for (auto e : *pick) {
      chosen.push_back(e);
      bool ok = feasible(budget - 1);
      chosen.pop_back();
      if (ok) return true;
    }
    return false;
  }
};

HittingSearch prepare(const std::vector<std::vector<EdgeKey>>& paths) {
  HittingSearch s;
  s.paths = paths;
  for (auto& p : s.paths) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  return s;
}

}  // namespace

std::uint32_t mincut_value(const std::vector<std::vector<EdgeKey>>& paths) {
  auto s = prepare(paths);
  for (std::size_t k = 0;; ++k) {
    if (s.feasible(k)) return static_cast<std::uint32_t>(k);
    // An empty path cannot be met by any edge set.
    if (k > paths.size()) return static_cast<std::uint32_t>(k);
  }
}

MincutResult mincut_paths(const std::vector<std::vector<EdgeKey>>& paths, std::uint32_t t, bool compute_value) {
  if (t > 4) throw std::invalid_argument("mincut_paths: threshold above 4 is not supported");
  MincutResult r;
  if (t == 0) {
    r.meets_threshold = true;
  } else {
    auto s = prepare(paths);
    r.meets_threshold = !s.feasible(t - 1);
  }
  if (compute_value) r.value = mincut_value(paths);
  return r;
}

}  // namespace advcongest
