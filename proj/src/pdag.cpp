#include "hlcd/pdag.hpp"

#include <boost/container/small_vector.hpp>

namespace hlcd {

void Pdag::check(VarIndex u, VarIndex v) const {
  if (u >= n_ || v >= n_) throw Error("pdag: node index out of range");
  if (u == v) throw Error("pdag: self-loop");
}

void Pdag::add_undirected(VarIndex u, VarIndex v) {
  check(u, v);
  if (adjacent(u, v)) return;
  marks_[u * n_ + v] = Mark::kUndirected;
  marks_[v * n_ + u] = Mark::kUndirected;
}

void Pdag::set_directed(VarIndex u, VarIndex v) {
  check(u, v);
  marks_[u * n_ + v] = Mark::kOut;
  marks_[v * n_ + u] = Mark::kIn;
}

void Pdag::set_undirected(VarIndex u, VarIndex v) {
  check(u, v);
  marks_[u * n_ + v] = Mark::kUndirected;
  marks_[v * n_ + u] = Mark::kUndirected;
}

void Pdag::remove_edge(VarIndex u, VarIndex v) {
  check(u, v);
  marks_[u * n_ + v] = Mark::kNone;
  marks_[v * n_ + u] = Mark::kNone;
}

std::vector<VarIndex> Pdag::neighbors(VarIndex u) const {
  std::vector<VarIndex> out;
  out.reserve(n_);
  for (VarIndex v = 0; v < n_; ++v)
    if (adjacent(u, v)) out.push_back(v);
  return out;
}

std::vector<VarIndex> Pdag::parents(VarIndex u) const {
  std::vector<VarIndex> out;
  out.reserve(n_);
  for (VarIndex v = 0; v < n_; ++v)
    if (directed(v, u)) out.push_back(v);
  return out;
}

std::vector<VarIndex> Pdag::children(VarIndex u) const {
  std::vector<VarIndex> out;
  out.reserve(n_);
  for (VarIndex v = 0; v < n_; ++v)
    if (directed(u, v)) out.push_back(v);
  return out;
}

std::vector<VarIndex> Pdag::undirected_neighbors(VarIndex u) const {
  std::vector<VarIndex> out;
  out.reserve(n_);
  for (VarIndex v = 0; v < n_; ++v)
    if (undirected(u, v)) out.push_back(v);
  return out;
}

bool Pdag::has_directed_path(VarIndex from, VarIndex to) const {
  boost::container::small_vector<char, 64> seen(n_, 0);
  boost::container::small_vector<VarIndex, 64> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const VarIndex u = stack.back();
    stack.pop_back();
    for (VarIndex v = 0; v < n_; ++v) {
      if (!directed(u, v)) continue;
      if (v == to) return true;
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return false;
}

bool Pdag::directed_part_acyclic() const {
  // Kahn's algorithm on the directed edges only.
  std::vector<std::size_t> indegree(n_, 0);
  for (VarIndex u = 0; u < n_; ++u)
    for (VarIndex v = 0; v < n_; ++v)
      if (directed(u, v)) ++indegree[v];
  std::vector<VarIndex> ready;
  for (VarIndex v = 0; v < n_; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::size_t removed = 0;
  while (!ready.empty()) {
    const VarIndex u = ready.back();
    ready.pop_back();
    ++removed;
    for (VarIndex v = 0; v < n_; ++v)
      if (directed(u, v) && --indegree[v] == 0) ready.push_back(v);
  }
  return removed == n_;
}

std::size_t Pdag::num_edges() const {
  std::size_t count = 0;
  for (VarIndex u = 0; u < n_; ++u)
    for (VarIndex v = u + 1; v < n_; ++v)
      if (adjacent(u, v)) ++count;
  return count;
}

std::vector<std::pair<VarIndex, VarIndex>> Pdag::edge_pairs() const {
  std::vector<std::pair<VarIndex, VarIndex>> out;
  for (VarIndex u = 0; u < n_; ++u)
    for (VarIndex v = u + 1; v < n_; ++v)
      if (adjacent(u, v)) out.emplace_back(u, v);
  return out;
}

}  // namespace hlcd
