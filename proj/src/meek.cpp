#include "hlcd/meek.hpp"

#include <algorithm>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace hlcd {

namespace {

class MeekRules {
 public:
  MeekRules(const Pdag& g, std::span<const std::uint8_t> known)
      : g_(g), known_(known), n_(g.num_nodes()), has_in_(n_), has_out_(n_) {}

  // Every rule needs a directed edge into b, out of b or into c. Flags go
  // stale within a pass, but a pass that changes nothing starts from fresh
  // flags, so the fixed point is unaffected.
  bool refresh() {
    std::fill(has_in_.begin(), has_in_.end(), 0);
    std::fill(has_out_.begin(), has_out_.end(), 0);
    bool any = false;
    for (VarIndex u = 0; u < n_; ++u) {
      for (VarIndex v = 0; v < n_; ++v) {
        if (u != v && g_.directed(u, v)) {
          has_out_[u] = 1;
          has_in_[v] = 1;
          any = true;
        }
      }
    }
    return any;
  }

  bool may_force(VarIndex b, VarIndex c) const { return has_in_[b] || has_out_[b] || has_in_[c]; }
  bool has_directed_path(VarIndex from, VarIndex to) const { return g_.has_directed_path(from, to); }
  std::uint64_t candidates(VarIndex) const { return ~std::uint64_t{0}; }
  void direct(VarIndex, VarIndex) {}

  bool nonadjacent(VarIndex a, VarIndex c) const {
    if (g_.adjacent(a, c)) return false;
    return known_.empty() || known_[a] || known_[c];
  }

  // An undirected edge takes part in a rule only once both endpoints are
  // flagged; before that its orientation may still change.
  bool settled(VarIndex u, VarIndex v) const { return known_.empty() || (known_[u] && known_[v]); }

  // True if some rule forces b->c for the undirected edge b-c.
  bool forces(VarIndex b, VarIndex c) const {
    if (!settled(b, c)) return false;
    for (VarIndex a = 0; a < n_; ++a) {
      if (a == b || a == c) continue;
      if (g_.directed(a, b) && nonadjacent(a, c)) return true;  // R1
      if (g_.directed(b, a) && g_.directed(a, c)) return true;  // R2
    }
    for (VarIndex k = 0; k < n_; ++k) {
      if (k == b || k == c || !g_.undirected(b, k) || !settled(b, k)) continue;
      for (VarIndex l = 0; l < n_; ++l) {
        if (l == b || l == c || l == k) continue;
        // R3
        if (l > k && g_.directed(k, c) && g_.undirected(b, l) && settled(b, l) && g_.directed(l, c) &&
            nonadjacent(k, l))
          return true;
        // R4
        if (g_.directed(k, l) && g_.directed(l, c) && g_.adjacent(b, l) && (!g_.undirected(b, l) || settled(b, l)) &&
            nonadjacent(k, c))
          return true;
      }
    }
    return false;
  }

 private:
  const Pdag& g_;
  std::span<const std::uint8_t> known_;
  std::size_t n_;
  boost::container::small_vector<char, 64> has_in_;
  boost::container::small_vector<char, 64> has_out_;
};

// Same rules over bitmasks, for graphs of at most 64 nodes.
class MaskMeek {
 public:
  MaskMeek(const Pdag& g, std::span<const std::uint8_t> known) : n_(g.num_nodes()) {
    all_ = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
    known_ = known.empty() ? all_ : 0;
    for (VarIndex v = 0; v < known.size(); ++v)
      if (known[v]) known_ |= bit(v);
    for (VarIndex u = 0; u < n_; ++u) und_[u] = pa_[u] = ch_[u] = 0;
    for (VarIndex u = 0; u < n_; ++u) {
      for (VarIndex v = 0; v < n_; ++v) {
        const Pdag::Mark m = g.mark(u, v);
        if (m == Pdag::Mark::kUndirected) {
          und_[u] |= bit(v);
        } else if (m == Pdag::Mark::kOut) {
          ch_[u] |= bit(v);
          pa_[v] |= bit(u);
        }
      }
    }
  }

  bool forces(VarIndex b, VarIndex c) const {
    if (!(known_ >> b & 1) || !(known_ >> c & 1)) return false;
    if (pa_[b] & trusted_nonadjacent(c)) return true;  // R1
    if (ch_[b] & pa_[c]) return true;                   // R2
    const std::uint64_t s = und_[b] & known_ & ~bit(c);
    for (std::uint64_t r = s & pa_[c]; r; r &= r - 1) {  // R3
      if (s & pa_[c] & trusted_nonadjacent(lowest(r))) return true;
    }
    const std::uint64_t adj_b = pa_[b] | ch_[b] | (und_[b] & known_);
    const std::uint64_t far = trusted_nonadjacent(c);
    for (std::uint64_t r = s & far; r; r &= r - 1) {  // R4
      if (ch_[lowest(r)] & pa_[c] & adj_b) return true;
    }
    return false;
  }

  bool has_directed_path(VarIndex from, VarIndex to) const {
    std::uint64_t seen = 0;
    std::uint64_t frontier = ch_[from];
    while (frontier) {
      if (frontier >> to & 1) return true;
      seen |= frontier;
      std::uint64_t next = 0;
      for (std::uint64_t r = frontier; r; r &= r - 1) next |= ch_[lowest(r)];
      frontier = next & ~seen;
    }
    return false;
  }

  bool refresh() const {
    std::uint64_t any = 0;
    for (VarIndex v = 0; v < n_; ++v) any |= ch_[v];
    return any != 0;
  }
  bool may_force(VarIndex, VarIndex) const { return true; }
  // Undirected edges b-c with both ends known, as a mask of c for each b.
  std::uint64_t candidates(VarIndex b) const { return (known_ >> b & 1) ? und_[b] & known_ : 0; }

  void direct(VarIndex u, VarIndex v) {
    und_[u] &= ~bit(v);
    und_[v] &= ~bit(u);
    ch_[u] |= bit(v);
    pa_[v] |= bit(u);
  }

 private:
  static std::uint64_t bit(VarIndex v) { return std::uint64_t{1} << v; }
  static VarIndex lowest(std::uint64_t m) { return static_cast<VarIndex>(__builtin_ctzll(m)); }

  std::uint64_t adjacency(VarIndex v) const { return und_[v] | pa_[v] | ch_[v]; }

  // Nodes whose non-adjacency to v is trusted.
  std::uint64_t trusted_nonadjacent(VarIndex v) const {
    const std::uint64_t trust = (known_ >> v & 1) ? all_ : known_;
    return ~adjacency(v) & ~bit(v) & trust & all_;
  }

  std::size_t n_;
  std::uint64_t all_ = 0;
  std::uint64_t known_ = 0;
  std::uint64_t und_[64];
  std::uint64_t pa_[64];
  std::uint64_t ch_[64];
};

template <typename Rules>
MeekStats run_rules(Pdag& graph, Rules& rules, const MeekOptions& options) {
  MeekStats stats;
  const std::size_t n = graph.num_nodes();
  bool changed = true;
  while (changed && rules.refresh()) {
    changed = false;
    for (VarIndex b = 0; b < n; ++b) {
      if (!rules.candidates(b)) continue;
      for (VarIndex c = 0; c < n; ++c) {
        if (c < 64 && !(rules.candidates(b) >> c & 1)) continue;
        if (b == c || !graph.undirected(b, c) || !rules.may_force(b, c) || !rules.forces(b, c)) continue;
        if (rules.has_directed_path(c, b)) {
          if (options.throw_on_cycle) throw ValidationError("meek_orient: orientation would create a directed cycle");
          ++stats.cycles_avoided;
          continue;
        }
        graph.set_directed(b, c);
        rules.direct(b, c);
        ++stats.oriented;
        changed = true;
      }
    }
  }
  return stats;
}

}  // namespace

MeekStats meek_orient_in_place(Pdag& graph, const MeekOptions& options) {
  if (!options.known.empty() && options.known.size() != graph.num_nodes()) {
    throw Error("meek_orient: known-mask size mismatch");
  }
  if (graph.num_nodes() <= 64 && !options.force_generic) {
    MaskMeek rules(graph, options.known);
    return run_rules(graph, rules, options);
  }
  MeekRules rules(graph, options.known);
  return run_rules(graph, rules, options);
}

Pdag meek_orient(Pdag graph) {
  meek_orient_in_place(graph);
  return graph;
}

}  // namespace hlcd
