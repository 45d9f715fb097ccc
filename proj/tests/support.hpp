#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hlcd/dataset.hpp"
#include "hlcd/network.hpp"

namespace hlcd::test {

// rows[i][v] is the code of variable v in sample i. Arity defaults to the
// largest code + 1 (at least 2).
inline Dataset from_rows(const std::vector<std::vector<std::int32_t>>& rows, std::vector<std::size_t> arities = {}) {
  const std::size_t n = rows.front().size();
  std::vector<std::vector<std::int32_t>> cols(n);
  for (const auto& r : rows)
    for (std::size_t v = 0; v < n; ++v) cols[v].push_back(r[v]);
  if (arities.empty()) {
    arities.assign(n, 2);
    for (std::size_t v = 0; v < n; ++v)
      for (const auto x : cols[v]) arities[v] = std::max<std::size_t>(arities[v], static_cast<std::size_t>(x) + 1);
  }
  std::vector<std::string> names;
  for (std::size_t v = 0; v < n; ++v) names.push_back("V" + std::to_string(v));
  return Dataset(std::move(names), std::move(arities), std::move(cols));
}

// Copies of each row, count times.
inline std::vector<std::vector<std::int32_t>> repeat(const std::vector<std::vector<std::int32_t>>& rows,
                                                     std::size_t count) {
  std::vector<std::vector<std::int32_t>> out;
  for (std::size_t c = 0; c < count; ++c) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

inline Dag make_dag(std::size_t n, const std::vector<std::pair<VarIndex, VarIndex>>& edges) {
  Dag dag(n);
  for (const auto& [u, v] : edges) dag.add_edge(u, v);
  return dag;
}

// Binary network over the DAG: every node flips its parents' XOR with
// probability noise (roots are fair coins).
inline Network xor_network(const Dag& dag, double noise) {
  std::vector<NetworkNode> nodes;
  for (VarIndex v = 0; v < dag.num_nodes(); ++v) {
    NetworkNode node;
    node.name = "X" + std::to_string(v);
    node.states = {"0", "1"};
    node.parents = dag.parents(v);
    const std::size_t q = std::size_t{1} << node.parents.size();
    for (std::size_t j = 0; j < q; ++j) {
      if (node.parents.empty()) {
        node.cpt.insert(node.cpt.end(), {0.5, 0.5});
        continue;
      }
      const bool odd = __builtin_popcountll(j) % 2 == 1;
      node.cpt.push_back(odd ? noise : 1.0 - noise);
      node.cpt.push_back(odd ? 1.0 - noise : noise);
    }
    nodes.push_back(std::move(node));
  }
  return Network(std::move(nodes));
}

// Binary network over the DAG: every node is the OR of its parents, flipped
// with probability noise. Unlike XOR, each parent is marginally dependent on
// the child.
inline Network or_network(const Dag& dag, double noise) {
  std::vector<NetworkNode> nodes;
  for (VarIndex v = 0; v < dag.num_nodes(); ++v) {
    NetworkNode node;
    node.name = "X" + std::to_string(v);
    node.states = {"0", "1"};
    node.parents = dag.parents(v);
    const std::size_t q = std::size_t{1} << node.parents.size();
    for (std::size_t j = 0; j < q; ++j) {
      if (node.parents.empty()) {
        node.cpt.insert(node.cpt.end(), {0.5, 0.5});
        continue;
      }
      const bool on = j != 0;
      node.cpt.push_back(on ? noise : 1.0 - noise);
      node.cpt.push_back(on ? 1.0 - noise : noise);
    }
    nodes.push_back(std::move(node));
  }
  return Network(std::move(nodes));
}

}  // namespace hlcd::test
