#include "advcongest/covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "advcongest/rng.hpp"

namespace advcongest {

namespace {

constexpr std::uint64_t kHashSalt = 0x68617368ULL;
constexpr std::uint64_t kSampleSalt = 0x73616d70ULL;
constexpr std::uint64_t kDirectedSalt = 0x64697265ULL;
constexpr std::size_t kHashTableLimit = std::size_t{1} << 26;

std::uint32_t ceil_log2(std::size_t x) {
  std::uint32_t r = 0;
  while ((std::size_t{1} << r) < x) ++r;
  return r;
}

std::uint64_t threshold_for(double p) {
  if (p >= 1.0) return ~std::uint64_t{0};
  if (p <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

using Bits = std::vector<std::uint64_t>;

bool any_and(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  for (std::size_t w = 0; w < words; ++w)
    if (a[w] & b[w]) return true;
  return false;
}

bool any_and3(const std::uint64_t* a, const std::uint64_t* b, const std::uint64_t* c, std::size_t words) {
  for (std::size_t w = 0; w < words; ++w)
    if (a[w] & b[w] & c[w]) return true;
  return false;
}

}  // namespace

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::hash: return "hash";
    case Flavor::sampled: return "sampled";
    case Flavor::expander_undirected: return "expander-undirected";
    case Flavor::expander_directed: return "expander-directed";
  }
  return "unknown";
}

Flavor flavor_from_string(const std::string& s) {
  if (s == "hash") return Flavor::hash;
  if (s == "sampled") return Flavor::sampled;
  if (s == "expander-undirected") return Flavor::expander_undirected;
  if (s == "expander-directed") return Flavor::expander_directed;
  throw std::invalid_argument("unknown family flavor '" + s + "'");
}

std::uint32_t CoveringFamily::hash_value(std::size_t h, EdgeId e) const {
  if (!hash_table_.empty()) return hash_table_[h * m_ + e];
  auto x = mix64(seed_, kHashSalt, h, e) >> 32;
  return static_cast<std::uint32_t>((x * q_) >> 32);
}

bool CoveringFamily::contains(EdgeId e, std::size_t i) const {
  switch (flavor_) {
    case Flavor::hash: return hash_value(i / q_, e) != i % q_;
    case Flavor::sampled:
    case Flavor::expander_undirected:
      return keep_all_ || mix64(seed_, kSampleSalt, i, e) < keep_threshold_;
    case Flavor::expander_directed: return contains_dir(2 * e, i) && contains_dir(2 * e + 1, i);
  }
  return false;
}

bool CoveringFamily::contains_dir(DirId d, std::size_t i) const {
  if (flavor_ != Flavor::expander_directed) return contains(d >> 1, i);
  if (keep_all_) return true;
  // Decided by the head of the direction from its own stream.
  std::uint64_t key = (std::uint64_t{head_of_dir_[d]} << 32) | (d >> 1);
  return mix64(seed_, kDirectedSalt, i, key) < keep_threshold_;
}

bool CoveringFamily::evaluate_at(NodeId /*viewer*/, EdgeId e, std::size_t i) const { return contains(e, i); }

std::vector<std::uint32_t> CoveringFamily::absent_indices(EdgeId e) const {
  std::vector<std::uint32_t> out;
  if (flavor_ == Flavor::hash) {
    out.reserve(h_size_);
    for (std::size_t h = 0; h < h_size_; ++h) out.push_back(static_cast<std::uint32_t>(h * q_ + hash_value(h, e)));
    return out;
  }
  for (std::size_t i = 0; i < ell_; ++i)
    if (!contains(e, i)) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

nlohmann::json CoveringFamily::descriptor() const {
  return {{"flavor", to_string(flavor_)}, {"seed", seed_}, {"params", params_}, {"ell", ell_}};
}

void CoveringFamily::build_head_table(const Graph& g) {
  head_of_dir_.resize(2 * g.m());
  for (DirId d = 0; d < 2 * g.m(); ++d) head_of_dir_[d] = g.dir_head(d);
}

std::pair<std::size_t, std::size_t> hash_family_shape(std::size_t m, std::uint32_t L, const HashFamilyParams& p) {
  auto logm = std::max<std::uint32_t>(1, ceil_log2(std::max<std::size_t>(m, 2)));
  auto h = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(p.a1 * L * logm - 1e-9)));
  auto q = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(p.a2 * L - 1e-9)));
  return {h, q};
}

CoveringFamily build_hash_family(const Graph& g, std::uint32_t L, std::uint64_t seed, const HashFamilyParams& p) {
  if (L < 1) throw std::invalid_argument("hash family needs L >= 1");
  if (p.a1 <= 0 || p.a2 <= 0) throw std::invalid_argument("hash family constants must be positive");
  CoveringFamily f;
  f.flavor_ = Flavor::hash;
  f.seed_ = seed;
  f.L_ = L;
  f.k_ = 1;
  f.n_ = g.n();
  f.m_ = g.m();
  std::tie(f.h_size_, f.q_) = hash_family_shape(g.m(), L, p);
  f.ell_ = f.h_size_ * f.q_;
  f.params_ = {{"L", L}, {"k", 1}, {"a1", p.a1}, {"a2", p.a2}, {"H_size", f.h_size_}, {"q", f.q_}, {"m", g.m()}};
  if (f.h_size_ * f.m_ <= kHashTableLimit) {
    f.hash_table_.resize(f.h_size_ * f.m_);
    for (std::size_t h = 0; h < f.h_size_; ++h)
      for (EdgeId e = 0; e < f.m_; ++e) {
        auto x = mix64(seed, kHashSalt, h, e) >> 32;
        f.hash_table_[h * f.m_ + e] = static_cast<std::uint32_t>((x * f.q_) >> 32);
      }
  }
  return f;
}

CoveringFamily build_sampled_family(const Graph& g, std::uint32_t L, std::uint32_t k, std::uint64_t seed,
                                    const SampledFamilyParams& p) {
  if (L < 1) throw std::invalid_argument("sampled family needs L >= 1");
  CoveringFamily f;
  f.flavor_ = Flavor::sampled;
  f.seed_ = seed;
  f.L_ = L;
  f.k_ = k;
  f.n_ = g.n();
  f.m_ = g.m();
  double ln_n = std::log(static_cast<double>(std::max<std::size_t>(g.n(), 2)));
  if (k == 0) {
    f.ell_ = 1;
    f.keep_ = 1.0;
  } else if (p.drop) {
    double d = *p.drop;
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("drop probability must lie in (0,1)");
    double size = p.b * std::pow(d, -static_cast<double>(k)) * k * ln_n;
    if (!(size <= static_cast<double>(p.cap)))
      throw std::invalid_argument("sampled family size exceeds cap; use the hash flavor or a smaller k");
    f.ell_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(size)));
    f.keep_ = 1.0 - d;
  } else {
    double kk = k;
    double size = p.b * std::exp(kk) * std::pow(L / kk, kk) * kk * ln_n;
    if (!(size <= static_cast<double>(p.cap)))
      throw std::invalid_argument("sampled family size exceeds cap; use the hash flavor or a smaller k");
    f.ell_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(size)));
    f.keep_ = 1.0 - kk / (L + kk);
  }
  f.keep_threshold_ = threshold_for(f.keep_);
  f.keep_all_ = f.keep_ >= 1.0;
  f.params_ = {{"L", L}, {"k", k}, {"b", p.b}, {"cap", p.cap}, {"keep", f.keep_}};
  if (p.drop) f.params_["drop"] = *p.drop;
  return f;
}

CoveringFamily build_expander_family(const Graph& g, std::uint32_t t, std::uint64_t seed, bool directed,
                                     const ExpanderFamilyParams& p, std::uint32_t L) {
  if (t < 1) throw std::invalid_argument("expander family needs t >= 1");
  CoveringFamily f;
  f.flavor_ = directed ? Flavor::expander_directed : Flavor::expander_undirected;
  f.seed_ = seed;
  f.L_ = L;
  f.k_ = 2 * t;
  f.n_ = g.n();
  f.m_ = g.m();
  double ln_n = std::log(static_cast<double>(std::max<std::size_t>(g.n(), 2)));
  f.ell_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(p.c_f * t * ln_n - 1e-9)));
  f.keep_ = std::min(1.0, p.gamma / t);
  f.keep_threshold_ = threshold_for(f.keep_);
  f.keep_all_ = f.keep_ >= 1.0;
  f.params_ = {{"L", L}, {"k", 2 * t}, {"t", t}, {"c_f", p.c_f}, {"gamma", p.gamma}, {"keep", f.keep_}};
  if (directed) f.build_head_table(g);
  return f;
}

CoveringFamily trivial_family(const Graph& g) {
  CoveringFamily f;
  f.flavor_ = Flavor::sampled;
  f.ell_ = 1;
  f.n_ = g.n();
  f.m_ = g.m();
  f.keep_ = 1.0;
  f.keep_all_ = true;
  f.params_ = {{"L", 0}, {"k", 0}, {"keep", 1.0}};
  return f;
}

CoveringFamily family_from_descriptor(const nlohmann::json& d, const Graph& g) {
  auto flavor = flavor_from_string(d.at("flavor").get<std::string>());
  auto seed = d.at("seed").get<std::uint64_t>();
  const auto& p = d.at("params");
  CoveringFamily f;
  switch (flavor) {
    case Flavor::hash:
      f = build_hash_family(g, p.at("L").get<std::uint32_t>(), seed,
                            {p.at("a1").get<double>(), p.at("a2").get<double>()});
      break;
    case Flavor::sampled: {
      if (!p.contains("b")) {
        f = trivial_family(g);
        break;
      }
      SampledFamilyParams sp;
      sp.b = p.at("b").get<double>();
      sp.cap = p.at("cap").get<std::size_t>();
      if (p.contains("drop")) sp.drop = p.at("drop").get<double>();
      f = build_sampled_family(g, p.at("L").get<std::uint32_t>(), p.at("k").get<std::uint32_t>(), seed, sp);
      break;
    }
    case Flavor::expander_undirected:
    case Flavor::expander_directed:
      f = build_expander_family(g, p.at("t").get<std::uint32_t>(), seed, flavor == Flavor::expander_directed,
                                {p.at("c_f").get<double>(), p.at("gamma").get<double>()},
                                p.value("L", std::uint32_t{0}));
      break;
  }
  if (d.contains("ell") && d.at("ell").get<std::size_t>() != f.ell())
    throw std::invalid_argument("family descriptor ell does not match its parameters");
  return f;
}

std::size_t width(const CoveringFamily& fam, const Graph& g) {
  std::size_t best = 0;
  if (fam.flavor() == Flavor::hash) {
    // Each hash function removes e from exactly one subgraph.
    for (EdgeId e = 0; e < g.m(); ++e) best = std::max(best, fam.absent_indices(e).size());
    return best;
  }
  for (EdgeId e = 0; e < g.m(); ++e) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < fam.ell(); ++i) c += !fam.contains(e, i);
    best = std::max(best, c);
  }
  return best;
}

namespace {

struct StrictSearch {
  const CoveringFamily& fam;
  const Graph& g;
  std::uint32_t L;
  std::uint32_t k;
  std::size_t words;
  std::vector<Bits> col_dir;  // per direction: subgraphs containing it
  std::vector<Bits> avoid;    // per edge: subgraphs containing neither direction
  std::vector<Bits> stack;
  std::vector<EdgeId> path;
  std::vector<char> on_node;
  std::vector<char> on_edge;
  NodeId src = 0;
  CoverCheck result;

  // Hash fast path: per depth, per hash function, the set of values hit by
  // the path (q <= 64).
  bool hash_fast = false;
  std::vector<std::vector<std::uint64_t>> hstack;

  StrictSearch(const CoveringFamily& f, const Graph& gr, std::uint32_t l, std::uint32_t kk)
      : fam(f), g(gr), L(l), k(kk), words((f.ell() + 63) / 64) {
    hash_fast = fam.flavor() == Flavor::hash && fam.hash_range() <= 64 && k <= 1;
    if (hash_fast) {
      hstack.assign(L + 1, std::vector<std::uint64_t>(fam.hash_count(), 0));
    } else {
      col_dir.assign(2 * g.m(), Bits(words, 0));
      avoid.assign(g.m(), Bits(words, 0));
      for (std::size_t i = 0; i < fam.ell(); ++i) {
        for (EdgeId e = 0; e < g.m(); ++e) {
          bool a = fam.contains_dir(2 * e, i), b = fam.contains_dir(2 * e + 1, i);
          if (a) col_dir[2 * e][i / 64] |= std::uint64_t{1} << (i % 64);
          if (b) col_dir[2 * e + 1][i / 64] |= std::uint64_t{1} << (i % 64);
          if (!a && !b) avoid[e][i / 64] |= std::uint64_t{1} << (i % 64);
        }
      }
      stack.assign(L + 1, Bits(words, ~std::uint64_t{0}));
      if (fam.ell() % 64) stack[0][words - 1] = (std::uint64_t{1} << (fam.ell() % 64)) - 1;
    }
    on_node.assign(g.n(), 0);
    on_edge.assign(g.m(), 0);
  }

  bool covered_hash(std::size_t depth, EdgeId e) const {
    const auto& masks = hstack[depth];
    for (std::size_t h = 0; h < masks.size(); ++h)
      if (!((masks[h] >> fam.hash_value(h, e)) & 1u)) return true;
    return false;
  }

  bool any_full_hash(std::size_t depth) const {
    const auto full = fam.hash_range() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << fam.hash_range()) - 1;
    for (auto m : hstack[depth])
      if (m != full) return true;
    return false;
  }

  void fail(NodeId v, std::vector<EdgeId> faults) {
    result.ok = false;
    result.counterexample = CoverViolation{src, v, std::move(faults), path};
  }

  // Checks every fault set of size <= k disjoint from the current path.
  void check_endpoint(NodeId v, std::size_t depth) {
    if (!fam.directed() && v < src) return;  // the reverse path was seen from v
    if (hash_fast) {
      ++result.cases;
      if (!any_full_hash(depth)) return fail(v, {});
      if (k == 0) return;
      for (EdgeId e = 0; e < g.m(); ++e) {
        if (on_edge[e]) continue;
        ++result.cases;
        if (!covered_hash(depth, e)) return fail(v, {e});
      }
      return;
    }
    const auto* cur = stack[depth].data();
    ++result.cases;
    bool nonempty = false;
    for (std::size_t w = 0; w < words; ++w) nonempty |= cur[w] != 0;
    if (!nonempty) return fail(v, {});
    if (k == 0) return;
    for (EdgeId e = 0; e < g.m() && result.ok; ++e) {
      if (on_edge[e]) continue;
      ++result.cases;
      if (!any_and(cur, avoid[e].data(), words)) return fail(v, {e});
      if (k < 2) continue;
      for (EdgeId f = e + 1; f < g.m(); ++f) {
        if (on_edge[f]) continue;
        ++result.cases;
        if (!any_and3(cur, avoid[e].data(), avoid[f].data(), words)) return fail(v, {e, f});
      }
    }
  }

  void dfs(NodeId x, std::size_t depth) {
    if (!result.ok) return;
    if (depth > 0) check_endpoint(x, depth);
    if (depth == L || !result.ok) return;
    for (const auto& inc : g.incident(x)) {
      if (on_node[inc.neighbor]) continue;
      if (hash_fast) {
        auto& next = hstack[depth + 1];
        const auto& prev = hstack[depth];
        for (std::size_t h = 0; h < next.size(); ++h)
          next[h] = prev[h] | (std::uint64_t{1} << fam.hash_value(h, inc.edge));
      } else {
        const auto& col = col_dir[g.dir(inc.edge, x)];
        for (std::size_t w = 0; w < words; ++w) stack[depth + 1][w] = stack[depth][w] & col[w];
      }
      on_node[inc.neighbor] = 1;
      on_edge[inc.edge] = 1;
      path.push_back(inc.edge);
      dfs(inc.neighbor, depth + 1);
      path.pop_back();
      on_edge[inc.edge] = 0;
      on_node[inc.neighbor] = 0;
      if (!result.ok) return;
    }
  }
};

}  // namespace

CoverCheck verify_strict(const CoveringFamily& fam, const Graph& g, std::uint32_t L, std::uint32_t k) {
  if (g.n() > 10) throw std::invalid_argument("verify_strict: n must be at most 10");
  if (k > 2) throw std::invalid_argument("verify_strict: k must be at most 2");
  // A simple path has at most n-1 edges, so larger L adds no paths.
  std::uint32_t eff = std::min<std::uint32_t>(L, g.n() ? static_cast<std::uint32_t>(g.n() - 1) : 0);
  StrictSearch s(fam, g, eff, k);
  for (NodeId u = 0; u < g.n() && s.result.ok; ++u) {
    s.src = u;
    s.on_node[u] = 1;
    s.dfs(u, 0);
    s.on_node[u] = 0;
  }
  return s.result;
}

CoverCheck verify_relaxed(const CoveringFamily& fam, const Graph& g, std::uint32_t L, std::uint32_t k,
                          std::uint64_t budget) {
  const std::size_t n = g.n(), m = g.m();
  // Number of fault sets of size <= k.
  long double sets = 1, c = 1;
  for (std::uint32_t j = 1; j <= k; ++j) {
    c = c * static_cast<long double>(m - j + 1) / j;
    sets += c;
  }
  if (sets > static_cast<long double>(budget)) throw std::invalid_argument("verify_relaxed: fault-set budget exceeded");

  const std::size_t nw = (n + 63) / 64;
  const std::size_t ell = fam.ell();
  const std::size_t ew = (ell + 63) / 64;
  // reach[i][u*nw + w]: bit v set iff dist_{G_i}(u,v) <= L.
  std::vector<Bits> reach(ell, Bits(n * nw, 0));
  std::vector<Bits> avoid(m, Bits(ew, 0));
  std::vector<std::uint32_t> dist(n);
  std::vector<NodeId> queue;
  for (std::size_t i = 0; i < ell; ++i) {
    std::vector<char> dir_ok(2 * m);
    for (DirId d = 0; d < 2 * m; ++d) dir_ok[d] = fam.contains_dir(d, i);
    for (EdgeId e = 0; e < m; ++e)
      if (!dir_ok[2 * e] && !dir_ok[2 * e + 1]) avoid[e][i / 64] |= std::uint64_t{1} << (i % 64);
    for (NodeId u = 0; u < n; ++u) {
      std::fill(dist.begin(), dist.end(), kUnreachable);
      queue.assign(1, u);
      dist[u] = 0;
      for (std::size_t h = 0; h < queue.size(); ++h) {
        NodeId x = queue[h];
        if (dist[x] == L) continue;
        for (const auto& inc : g.incident(x)) {
          if (!dir_ok[g.dir(inc.edge, x)] || dist[inc.neighbor] != kUnreachable) continue;
          dist[inc.neighbor] = dist[x] + 1;
          queue.push_back(inc.neighbor);
        }
      }
      for (auto v : queue) reach[i][u * nw + v / 64] |= std::uint64_t{1} << (v % 64);
    }
  }

  CoverCheck result;
  Bits allowed(ew), acc(n * nw);
  std::vector<EdgeId> faults;
  auto check = [&]() {
    ++result.cases;
    std::fill(allowed.begin(), allowed.end(), ~std::uint64_t{0});
    if (ell % 64) allowed[ew - 1] = (std::uint64_t{1} << (ell % 64)) - 1;
    for (auto e : faults)
      for (std::size_t w = 0; w < ew; ++w) allowed[w] &= avoid[e][w];
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t w = 0; w < ew; ++w) {
      for (auto bits = allowed[w]; bits; bits &= bits - 1) {
        std::size_t i = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        for (std::size_t x = 0; x < acc.size(); ++x) acc[x] |= reach[i][x];
      }
    }
    for (NodeId u = 0; u < n; ++u) {
      bool full = true;
      for (NodeId v = 0; v < n && full; ++v) full = (acc[u * nw + v / 64] >> (v % 64)) & 1u;
      if (full) continue;
      // Only pairs that g minus the faults keeps within distance L count.
      auto d = bfs_dist(g, u, EdgeSet(faults));
      for (NodeId v = 0; v < n; ++v) {
        if (d[v] > L) continue;
        if (!((acc[u * nw + v / 64] >> (v % 64)) & 1u)) {
          result.ok = false;
          result.counterexample = CoverViolation{u, v, faults, {}};
          return false;
        }
      }
    }
    return true;
  };
  // Enumerate fault sets of size 0..k in lexicographic order.
  std::vector<EdgeId> idx;
  if (!check()) return result;
  for (std::uint32_t size = 1; size <= k && size <= m; ++size) {
    idx.resize(size);
    for (std::uint32_t j = 0; j < size; ++j) idx[j] = j;
    while (true) {
      faults = idx;
      if (!check()) return result;
      int j = static_cast<int>(size) - 1;
      while (j >= 0 && idx[j] == m - size + j) --j;
      if (j < 0) break;
      ++idx[j];
      for (std::uint32_t r = j + 1; r < size; ++r) idx[r] = idx[r - 1] + 1;
    }
  }
  return result;
}

}  // namespace advcongest
