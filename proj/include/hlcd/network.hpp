#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hlcd/common.hpp"
#include "hlcd/dataset.hpp"
#include "hlcd/pdag.hpp"

namespace hlcd {

/// Directed graph stored as ordered parent lists plus child lists.
class Dag {
 public:
  Dag() = default;
  explicit Dag(std::size_t num_nodes) : parents_(num_nodes), children_(num_nodes) {}

  std::size_t num_nodes() const { return parents_.size(); }

  /// Appends from as the last parent of to. Does not check for cycles.
  void add_edge(VarIndex from, VarIndex to);
  bool has_edge(VarIndex from, VarIndex to) const;
  bool adjacent(VarIndex u, VarIndex v) const { return has_edge(u, v) || has_edge(v, u); }

  const std::vector<VarIndex>& parents(VarIndex v) const { return parents_[v]; }
  const std::vector<VarIndex>& children(VarIndex v) const { return children_[v]; }
  std::size_t num_edges() const;

  /// Kahn order, ties broken by ascending index. Throws ValidationError on a cycle.
  std::vector<VarIndex> topological_order() const;
  bool is_acyclic() const;

 private:
  std::vector<std::vector<VarIndex>> parents_;
  std::vector<std::vector<VarIndex>> children_;
};

struct NetworkNode {
  std::string name;
  std::vector<std::string> states;
  std::vector<VarIndex> parents;
  /// q x r probabilities, row-major by parent configuration (first parent most
  /// significant, same encoding as ContingencyTable).
  std::vector<double> cpt;
};

/// Discrete Bayesian network: a DAG with one conditional probability table
/// per node.
class Network {
 public:
  /// Validates acyclicity, CPT shape, entries in [0,1] and row sums within
  /// 1e-6. Throws ValidationError.
  explicit Network(std::vector<NetworkNode> nodes);

  std::size_t num_nodes() const { return nodes_.size(); }
  const NetworkNode& node(VarIndex v) const { return nodes_.at(v); }
  const std::vector<NetworkNode>& nodes() const { return nodes_; }
  const Dag& dag() const { return dag_; }
  const std::vector<VarIndex>& topological_order() const { return topo_; }

  std::size_t arity(VarIndex v) const { return nodes_[v].states.size(); }
  std::size_t num_configs(VarIndex v) const;
  std::span<const double> cpt_row(VarIndex v, std::size_t config) const;

  VarIndex index_of(std::string_view name) const;
  std::vector<std::string> names() const;
  std::vector<std::size_t> arities() const;

 private:
  std::vector<NetworkNode> nodes_;
  Dag dag_;
  std::vector<VarIndex> topo_;
};

/// {"nodes":[{"name":str,"states":int|[str,...],"parents":[str,...],"cpt":[[p,...],...]}]}
Network parse_network_json(std::string_view text);
std::string write_network_json(const Network& net);

/// BIF 0.15 subset: network, variable ("type discrete [k] { ... }") and
/// probability blocks with "table" or "(s1, s2) p1, p2;" rows.
Network parse_bif(std::string_view text);

/// Dispatches on extension: ".bif" is BIF, anything else JSON.
Network load_network_file(const std::string& path);

/// Ancestral sampling. Node v draws from its own xoshiro256** stream seeded
/// with derive_seed(seed, v), so a column depends only on its own stream and
/// its parents' columns.
Dataset forward_sample(const Network& net, std::size_t num_samples, std::uint64_t seed);

/// Bayes-ball reachability. Throws Error on invalid or overlapping indices.
bool d_separated(const Dag& dag, VarIndex x, VarIndex y, std::span<const VarIndex> z);
bool d_separated(const Network& net, VarIndex x, VarIndex y, std::span<const VarIndex> z);

/// Bitmask form for graphs with at most 64 nodes: the set of nodes outside z
/// that are d-connected to x given z (x itself excluded).
std::uint64_t d_connected_mask(const Dag& dag, VarIndex x, std::uint64_t z_mask);
/// Same sweep over precomputed parent and child bitmasks.
std::uint64_t d_connected_mask(std::span<const std::uint64_t> parent_masks, std::span<const std::uint64_t> child_masks,
                               VarIndex x, std::uint64_t z_mask);

/// Parents and children of target in the DAG, ascending.
VarSet true_pc(const Dag& dag, VarIndex target);
VarSet true_pc(const Network& net, VarIndex target);

/// Skeleton with every unshielded collider a->c<-b directed, all other edges
/// undirected.
Pdag v_structure_pattern(const Dag& dag);

/// CPDAG of the Markov equivalence class: pattern plus Meek closure.
Pdag cpdag(const Dag& dag);

/// CPDAG restricted to the edges incident to target.
Pdag true_local_cpdag(const Dag& dag, VarIndex target);
Pdag true_local_cpdag(const Network& net, VarIndex target);

}  // namespace hlcd
