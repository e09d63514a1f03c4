#include "kum/core/canonical.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <sstream>

#include "kum/core/error.hpp"

namespace kum {
namespace canon {
namespace {

// Ordered partition of the vertex set into cells.
struct Partition {
  std::uint8_t n = 0;
  std::uint8_t cells = 0;
  std::array<std::uint8_t, kMaxCanonicalNodes> elems{};
  std::array<std::uint8_t, kMaxCanonicalNodes + 1> start{};

  std::uint64_t mask(int c) const {
    std::uint64_t m = 0;
    for (int k = start[c]; k < start[c + 1]; ++k) m |= std::uint64_t{1} << elems[k];
    return m;
  }

  // Splits cell c after its first element.
  void split_front(int c) {
    for (int k = cells; k > c; --k) start[k + 1] = start[k];
    start[c + 1] = static_cast<std::uint8_t>(start[c] + 1);
    ++cells;
  }
};

// Equitable refinement: every cell ends up with a uniform neighbor count into
// every other cell. Split order depends only on cell positions and counts, so
// the result commutes with vertex renaming.
void refine(const DenseGraph& g, Partition& p) {
  std::array<std::uint8_t, kMaxCanonicalNodes> count{};
restart:
  for (int s = 0; s < p.cells; ++s) {
    const std::uint64_t splitter = p.mask(s);
    for (int c = 0; c < p.cells; ++c) {
      const int b = p.start[c];
      const int e = p.start[c + 1];
      if (e - b == 1) continue;
      bool uniform = true;
      for (int k = b; k < e; ++k) {
        count[k] = static_cast<std::uint8_t>(std::popcount(g.adjacency[p.elems[k]] & splitter));
        if (count[k] != count[b]) uniform = false;
      }
      if (uniform) continue;

      for (int k = b + 1; k < e; ++k) {
        const std::uint8_t v = p.elems[k];
        const std::uint8_t key = count[k];
        int j = k - 1;
        while (j >= b && count[j] > key) {
          p.elems[j + 1] = p.elems[j];
          count[j + 1] = count[j];
          --j;
        }
        p.elems[j + 1] = v;
        count[j + 1] = key;
      }

      std::array<std::uint8_t, kMaxCanonicalNodes> cuts{};
      int ncuts = 0;
      for (int k = b + 1; k < e; ++k) {
        if (count[k] != count[k - 1]) cuts[ncuts++] = static_cast<std::uint8_t>(k);
      }
      for (int k = p.cells; k > c; --k) p.start[k + ncuts] = p.start[k];
      for (int i = 0; i < ncuts; ++i) p.start[c + 1 + i] = cuts[i];
      p.cells = static_cast<std::uint8_t>(p.cells + ncuts);
      goto restart;
    }
  }
}

using Perm = std::array<std::uint8_t, kMaxCanonicalNodes>;

class Searcher {
 public:
  explicit Searcher(const DenseGraph& g) : g_(g) {}

  Labeling run() {
    Partition p;
    p.n = static_cast<std::uint8_t>(g_.n);
    std::array<std::uint8_t, kMaxCanonicalNodes> idx{};
    std::iota(idx.begin(), idx.begin() + g_.n, std::uint8_t{0});
    std::stable_sort(idx.begin(), idx.begin() + g_.n, [&](std::uint8_t a, std::uint8_t b) {
      const int ka = a == g_.root ? -1 : g_.color[a];
      const int kb = b == g_.root ? -1 : g_.color[b];
      return ka < kb;
    });
    p.elems = idx;
    p.cells = 0;
    for (std::size_t k = 0; k < g_.n; ++k) {
      const int key = idx[k] == g_.root ? -1 : g_.color[idx[k]];
      const int prev = k == 0 ? -2 : (idx[k - 1] == g_.root ? -1 : g_.color[idx[k - 1]]);
      if (key != prev) p.start[p.cells++] = static_cast<std::uint8_t>(k);
    }
    p.start[p.cells] = p.n;
    visit(p);
    return best_;
  }

 private:
  void visit(Partition p) {
    refine(g_, p);
    if (p.cells == p.n) {
      leaf(p);
      return;
    }
    int target = 0;
    while (p.start[target + 1] - p.start[target] == 1) ++target;
    const int b = p.start[target];
    const int e = p.start[target + 1];
    std::array<std::uint8_t, kMaxCanonicalNodes> candidates{};
    std::copy(p.elems.begin() + b, p.elems.begin() + e, candidates.begin());

    std::array<std::uint8_t, kMaxCanonicalNodes> explored{};
    int nexplored = 0;
    for (int i = 0; i < e - b; ++i) {
      const std::uint8_t v = candidates[i];
      if (nexplored > 0 && in_explored_orbit(v, explored, nexplored)) continue;
      Partition q = p;
      auto it = std::find(q.elems.begin() + b, q.elems.begin() + e, v);
      std::iter_swap(q.elems.begin() + b, it);
      q.split_front(target);
      prefix_[depth_++] = v;
      visit(q);
      --depth_;
      explored[nexplored++] = v;
    }
  }

  bool in_explored_orbit(std::uint8_t v, const std::array<std::uint8_t, kMaxCanonicalNodes>& explored,
                         int nexplored) {
    if (automorphisms_.empty()) return false;
    std::array<std::uint8_t, kMaxCanonicalNodes> parent{};
    std::iota(parent.begin(), parent.begin() + g_.n, std::uint8_t{0});
    auto find = [&](std::uint8_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool any = false;
    for (const Perm& gamma : automorphisms_) {
      bool fixes = true;
      for (int d = 0; d < depth_ && fixes; ++d) fixes = gamma[prefix_[d]] == prefix_[d];
      if (!fixes) continue;
      any = true;
      for (std::size_t x = 0; x < g_.n; ++x) {
        const std::uint8_t a = find(static_cast<std::uint8_t>(x));
        const std::uint8_t c = find(gamma[x]);
        if (a != c) parent[std::max(a, c)] = std::min(a, c);
      }
    }
    if (!any) return false;
    const std::uint8_t root = find(v);
    for (int i = 0; i < nexplored; ++i) {
      if (find(explored[i]) == root) return true;
    }
    return false;
  }

  void leaf(const Partition& p) {
    Labeling cur;
    cur.n = g_.n;
    std::array<std::uint8_t, kMaxCanonicalNodes> pos{};
    for (std::size_t i = 0; i < g_.n; ++i) {
      cur.order[i] = p.elems[i];
      pos[p.elems[i]] = static_cast<std::uint8_t>(i);
    }
    for (std::size_t i = 0; i < g_.n; ++i) {
      std::uint64_t row = 0;
      std::uint64_t adj = g_.adjacency[cur.order[i]];
      while (adj) {
        const int v = std::countr_zero(adj);
        adj &= adj - 1;
        row |= std::uint64_t{1} << pos[v];
      }
      cur.rows[i] = row;
    }
    if (!have_best_) {
      best_ = cur;
      have_best_ = true;
      return;
    }
    const auto cmp = std::lexicographical_compare_three_way(cur.rows.begin(), cur.rows.begin() + g_.n,
                                                            best_.rows.begin(), best_.rows.begin() + g_.n);
    if (cmp < 0) {
      best_ = cur;
    } else if (cmp == 0 && automorphisms_.size() < kMaxAutomorphisms) {
      Perm gamma{};
      for (std::size_t i = 0; i < g_.n; ++i) gamma[best_.order[i]] = cur.order[i];
      automorphisms_.push_back(gamma);
    }
  }

  static constexpr std::size_t kMaxAutomorphisms = 128;

  const DenseGraph& g_;
  Labeling best_;
  bool have_best_ = false;
  std::vector<Perm> automorphisms_;
  std::array<std::uint8_t, kMaxCanonicalNodes> prefix_{};
  int depth_ = 0;
};

constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t finalize(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

struct TwoLane {
  std::uint64_t a = 0xcbf29ce484222325ULL;
  std::uint64_t b = 0x84222325cbf29ce4ULL;

  void byte(std::uint8_t v) {
    a = (a ^ v) * kFnvPrime;
    b = (b ^ static_cast<std::uint8_t>(v ^ 0x5a)) * 0x00000100000001b3ULL;
    b = std::rotl(b, 7);
  }
  void word(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void text(const std::string& s) {
    word(s.size());
    for (char c : s) byte(static_cast<std::uint8_t>(c));
  }
};

}  // namespace

Labeling canonical_labeling(const DenseGraph& g) {
  if (g.n == 0) return Labeling{};
  return Searcher(g).run();
}

Digest digest(const DenseGraph& g, const Labeling& labeling, const std::vector<std::string>& color_names) {
  TwoLane h;
  h.word(g.n);
  for (std::size_t i = 0; i < labeling.n; ++i) h.text(color_names.at(g.color[labeling.order[i]]));
  for (std::size_t i = 0; i < labeling.n; ++i) h.word(labeling.rows[i]);
  return Digest{finalize(h.a), finalize(h.b ^ std::rotl(h.a, 17))};
}

}  // namespace canon

namespace {

struct Dense {
  canon::DenseGraph graph;
  std::vector<std::string> names;
};

Dense to_dense(const StorageGraph& g, std::size_t size_limit) {
  const std::size_t limit = std::min(size_limit, kMaxCanonicalNodes);
  if (g.node_count() > limit) {
    throw Error(ErrorCode::SizeLimit,
                std::to_string(g.node_count()) + " nodes exceeds canonicalization bound " + std::to_string(limit));
  }
  Dense d;
  if (g.empty()) return d;
  if (!g.contains(g.active())) throw Error(ErrorCode::NodeUnknown, "active node is not a member");

  const auto ids = g.node_ids();
  std::map<NodeId, std::size_t> index;
  std::map<std::string, std::uint8_t> rank;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    index[ids[i]] = i;
    rank.emplace(g.label(ids[i]).name, 0);
  }
  std::uint8_t r = 0;
  for (auto& [name, value] : rank) {
    value = r++;
    d.names.push_back(name);
  }
  d.graph.n = ids.size();
  d.graph.root = index.at(g.active());
  for (std::size_t i = 0; i < ids.size(); ++i) d.graph.color[i] = rank.at(g.label(ids[i]).name);
  for (const auto& [a, b] : g.edges()) d.graph.add_edge(index.at(a), index.at(b));
  return d;
}

}  // namespace

std::string canonical_hash(const StorageGraph& g, std::size_t size_limit) {
  const Dense d = to_dense(g, size_limit);
  const auto labeling = canon::canonical_labeling(d.graph);
  const auto dg = canon::digest(d.graph, labeling, d.names);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 0; i < 16; ++i) {
    out[i] = kHex[(dg.hi >> (60 - 4 * i)) & 0xf];
    out[16 + i] = kHex[(dg.lo >> (60 - 4 * i)) & 0xf];
  }
  return out;
}

std::string canonical_form(const StorageGraph& g, std::size_t size_limit) {
  const Dense d = to_dense(g, size_limit);
  const auto labeling = canon::canonical_labeling(d.graph);
  std::ostringstream out;
  out << d.graph.n << ';';
  for (std::size_t i = 0; i < labeling.n; ++i) {
    if (i) out << ',';
    out << d.names[d.graph.color[labeling.order[i]]];
  }
  out << ';' << std::hex;
  for (std::size_t i = 0; i < labeling.n; ++i) out << labeling.rows[i] << '.';
  return out.str();
}

}  // namespace kum
