#pragma once

#include <cstdint>
#include <span>

#include "hlcd/pdag.hpp"

namespace hlcd {

struct MeekOptions {
  /// Empty means every adjacency in the graph is known. Otherwise a pair's
  /// non-adjacency is trusted only when at least one endpoint is flagged, and
  /// rules that need an untrusted non-adjacency do not fire. Undirected edges
  /// with an unflagged endpoint are neither premises nor conclusions.
  std::span<const std::uint8_t> known;
  /// When false, an orientation that would close a directed cycle is skipped
  /// and counted instead of raising ValidationError.
  bool throw_on_cycle = true;
  /// Use the matrix implementation even when the bitmask one applies.
  bool force_generic = false;
};

struct MeekStats {
  std::size_t oriented = 0;
  std::size_t cycles_avoided = 0;
};

/// Applies Meek rules R1-R4 to a fixed point. Directed edges are never
/// un-directed, so the result is idempotent and the directed edge set only
/// grows.
///
///   R1: a->b, b-c, a,c non-adjacent               => b->c
///   R2: b->a->c, b-c                                => b->c
///   R3: b-k->c, b-l->c, k,l non-adjacent, b-c       => b->c
///   R4: b-k->l->c, b adjacent l, k,c non-adjacent   => b->c
MeekStats meek_orient_in_place(Pdag& graph, const MeekOptions& options = {});

/// Throws ValidationError if closure would create a directed cycle.
Pdag meek_orient(Pdag graph);

}  // namespace hlcd
