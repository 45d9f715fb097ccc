#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hlcd/common.hpp"

namespace hlcd {

/// Partially directed graph over a fixed node set, stored as a dense
/// adjacency matrix. At most one edge per unordered pair, no self-loops.
class Pdag {
 public:
  enum class Mark : std::uint8_t { kNone, kUndirected, kOut, kIn };  // kOut at (u,v) means u->v

  Pdag() = default;
  explicit Pdag(std::size_t num_nodes) : n_(num_nodes), marks_(num_nodes * num_nodes, Mark::kNone) {}

  std::size_t num_nodes() const { return n_; }

  Mark mark(VarIndex u, VarIndex v) const { return marks_[u * n_ + v]; }
  bool adjacent(VarIndex u, VarIndex v) const { return mark(u, v) != Mark::kNone; }
  bool undirected(VarIndex u, VarIndex v) const { return mark(u, v) == Mark::kUndirected; }
  /// True iff u->v.
  bool directed(VarIndex u, VarIndex v) const { return mark(u, v) == Mark::kOut; }

  /// Adds u-v if the pair is not adjacent yet; an existing edge keeps its mark.
  void add_undirected(VarIndex u, VarIndex v);
  /// Sets u->v, replacing whatever edge the pair had.
  void set_directed(VarIndex u, VarIndex v);
  void set_undirected(VarIndex u, VarIndex v);
  void remove_edge(VarIndex u, VarIndex v);

  std::vector<VarIndex> neighbors(VarIndex u) const;
  std::vector<VarIndex> parents(VarIndex u) const;
  std::vector<VarIndex> children(VarIndex u) const;
  std::vector<VarIndex> undirected_neighbors(VarIndex u) const;

  /// True iff a directed path from -> ... -> to exists (length >= 1).
  bool has_directed_path(VarIndex from, VarIndex to) const;
  bool directed_part_acyclic() const;

  std::size_t num_edges() const;
  /// Every edge once as (u, v, mark at (u,v)) with u < v.
  std::vector<std::pair<VarIndex, VarIndex>> edge_pairs() const;

  friend bool operator==(const Pdag&, const Pdag&) = default;

 private:
  void check(VarIndex u, VarIndex v) const;

  std::size_t n_ = 0;
  std::vector<Mark> marks_;
};

}  // namespace hlcd
