#include "hlcd/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "hlcd/meek.hpp"
#include "hlcd/rng.hpp"

namespace hlcd {

// ---------------------------------------------------------------- Dag

void Dag::add_edge(VarIndex from, VarIndex to) {
  if (from >= num_nodes() || to >= num_nodes()) throw Error("dag: node index out of range");
  if (from == to) throw ValidationError("dag: self-loop");
  parents_[to].push_back(from);
  children_[from].push_back(to);
}

bool Dag::has_edge(VarIndex from, VarIndex to) const {
  const auto& p = parents_[to];
  return std::find(p.begin(), p.end(), from) != p.end();
}

std::size_t Dag::num_edges() const {
  std::size_t count = 0;
  for (const auto& p : parents_) count += p.size();
  return count;
}

std::vector<VarIndex> Dag::topological_order() const {
  const std::size_t n = num_nodes();
  std::vector<std::size_t> indegree(n);
  for (VarIndex v = 0; v < n; ++v) indegree[v] = parents_[v].size();
  // Min-index first so the order is reproducible.
  std::vector<VarIndex> ready;
  for (VarIndex v = n; v-- > 0;)
    if (indegree[v] == 0) ready.push_back(v);
  std::vector<VarIndex> order;
  order.reserve(n);
  while (!ready.empty()) {
    const auto it = std::min_element(ready.begin(), ready.end());
    const VarIndex u = *it;
    ready.erase(it);
    order.push_back(u);
    for (const VarIndex c : children_[u])
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (order.size() != n) throw ValidationError("cycle detected in network graph");
  return order;
}

bool Dag::is_acyclic() const {
  try {
    topological_order();
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

// ---------------------------------------------------------------- Network

Network::Network(std::vector<NetworkNode> nodes) : nodes_(std::move(nodes)), dag_(nodes_.size()) {
  std::unordered_set<std::string> seen;
  for (const auto& node : nodes_) {
    if (node.name.empty()) throw ValidationError("node with empty name");
    if (!seen.insert(node.name).second) throw ValidationError("duplicate node '" + node.name + "'");
    if (node.states.empty()) throw ValidationError("node '" + node.name + "' has no states");
  }
  for (VarIndex v = 0; v < nodes_.size(); ++v) {
    std::unordered_set<VarIndex> ps;
    for (const VarIndex p : nodes_[v].parents) {
      if (p >= nodes_.size()) throw ValidationError("node '" + nodes_[v].name + "': parent index out of range");
      if (p == v || !ps.insert(p).second) {
        throw ValidationError("node '" + nodes_[v].name + "': invalid parent list");
      }
      dag_.add_edge(p, v);
    }
  }
  topo_ = dag_.topological_order();

  for (VarIndex v = 0; v < nodes_.size(); ++v) {
    const auto& node = nodes_[v];
    const std::size_t q = num_configs(v);
    const std::size_t r = arity(v);
    if (node.cpt.size() != q * r) {
      throw ValidationError("node '" + node.name + "': CPT dimension mismatch (expected " + std::to_string(q) +
                            " x " + std::to_string(r) + ")");
    }
    for (std::size_t j = 0; j < q; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < r; ++k) {
        const double p = node.cpt[j * r + k];
        if (!(p >= 0.0 && p <= 1.0)) {
          throw ValidationError("node '" + node.name + "': CPT entry outside [0,1]");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        throw ValidationError("node '" + node.name + "': CPT row not normalized (row " + std::to_string(j) +
                              " sums to " + std::to_string(sum) + ")");
      }
    }
  }
}

std::size_t Network::num_configs(VarIndex v) const {
  std::size_t q = 1;
  for (const VarIndex p : nodes_[v].parents) q *= arity(p);
  return q;
}

std::span<const double> Network::cpt_row(VarIndex v, std::size_t config) const {
  const std::size_t r = arity(v);
  return std::span<const double>(nodes_[v].cpt).subspan(config * r, r);
}

VarIndex Network::index_of(std::string_view name) const {
  for (VarIndex v = 0; v < nodes_.size(); ++v)
    if (nodes_[v].name == name) return v;
  throw Error("unknown node '" + std::string(name) + "'");
}

std::vector<std::string> Network::names() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_) out.push_back(n.name);
  return out;
}

std::vector<std::size_t> Network::arities() const {
  std::vector<std::size_t> out;
  for (const auto& n : nodes_) out.push_back(n.states.size());
  return out;
}

// ---------------------------------------------------------------- JSON

Network parse_network_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("network json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw ParseError("network json: expected an object with a \"nodes\" array");
  }
  const auto& jnodes = doc["nodes"];
  std::unordered_map<std::string, VarIndex> index;
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const auto& jn = jnodes[i];
    if (!jn.is_object() || !jn.contains("name") || !jn["name"].is_string()) {
      throw ParseError("network json: node " + std::to_string(i) + " lacks a string \"name\"");
    }
    if (!index.emplace(jn["name"].get<std::string>(), i).second) {
      throw ValidationError("network json: duplicate node '" + jn["name"].get<std::string>() + "'");
    }
  }

  std::vector<NetworkNode> nodes(jnodes.size());
  try {
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
      const auto& jn = jnodes[i];
      auto& node = nodes[i];
      node.name = jn["name"].get<std::string>();
      const auto& states = jn.at("states");
      if (states.is_number_integer()) {
        const auto k = states.get<std::int64_t>();
        if (k < 1) throw ValidationError("node '" + node.name + "': states must be >= 1");
        for (std::int64_t s = 0; s < k; ++s) node.states.push_back(std::to_string(s));
      } else if (states.is_array()) {
        for (const auto& s : states) node.states.push_back(s.get<std::string>());
      } else {
        throw ParseError("node '" + node.name + "': \"states\" must be an integer or a list of labels");
      }
      if (jn.contains("parents")) {
        for (const auto& p : jn["parents"]) {
          const auto name = p.get<std::string>();
          const auto it = index.find(name);
          if (it == index.end()) {
            throw ValidationError("node '" + node.name + "': unknown parent name '" + name + "'");
          }
          node.parents.push_back(it->second);
        }
      }
      const auto& cpt = jn.at("cpt");
      if (!cpt.is_array()) throw ParseError("node '" + node.name + "': \"cpt\" must be a list of rows");
      for (const auto& row : cpt) {
        if (!row.is_array() || row.size() != node.states.size()) {
          throw ValidationError("node '" + node.name + "': CPT dimension mismatch");
        }
        for (const auto& p : row) node.cpt.push_back(p.get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("network json: ") + e.what());
  }
  return Network(std::move(nodes));
}

std::string write_network_json(const Network& net) {
  nlohmann::ordered_json doc;
  auto& jnodes = doc["nodes"] = nlohmann::ordered_json::array();
  for (VarIndex v = 0; v < net.num_nodes(); ++v) {
    const auto& node = net.node(v);
    nlohmann::ordered_json jn;
    jn["name"] = node.name;
    jn["states"] = node.states;
    auto& parents = jn["parents"] = nlohmann::ordered_json::array();
    for (const VarIndex p : node.parents) parents.push_back(net.node(p).name);
    auto& cpt = jn["cpt"] = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < net.num_configs(v); ++j) {
      const auto row = net.cpt_row(v, j);
      cpt.push_back(std::vector<double>(row.begin(), row.end()));
    }
    jnodes.push_back(std::move(jn));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- BIF

namespace {

class BifLexer {
 public:
  explicit BifLexer(std::string_view text) : text_(text) {}

  // Returns the empty view at end of input.
  std::string_view next() {
    skip_space_and_comments();
    if (pos_ >= text_.size()) return {};
    const char c = text_[pos_];
    if (is_punct(c)) return text_.substr(pos_++, 1);
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_punct(text_[pos_]) && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::string_view peek() {
    const std::size_t saved = pos_;
    const auto tok = next();
    pos_ = saved;
    return tok;
  }

  void expect(std::string_view want) {
    const auto got = next();
    if (got != want) {
      throw ParseError("bif: expected '" + std::string(want) + "' but found '" + std::string(got) + "' at line " +
                       std::to_string(line()));
    }
  }

  std::size_t line() const { return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + pos_, '\n')); }

  // Skips tokens through the next ';' at the current nesting level.
  void skip_statement() {
    while (true) {
      const auto tok = next();
      if (tok.empty() || tok == ";") return;
    }
  }

 private:
  static bool is_punct(char c) {
    return c == '{' || c == '}' || c == '(' || c == ')' || c == '[' || c == ']' || c == ';' || c == ',' || c == '|';
  }
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      if (is_space(text_[pos_])) {
        ++pos_;
      } else if (text_.substr(pos_, 2) == "//") {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (text_.substr(pos_, 2) == "/*") {
        const auto end = text_.find("*/", pos_ + 2);
        pos_ = end == std::string_view::npos ? text_.size() : end + 2;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double parse_probability(std::string_view tok, std::size_t line) {
  std::string s(tok);
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ParseError("bif: bad probability '" + s + "' at line " + std::to_string(line));
  }
  return value;
}

struct BifVariable {
  std::string name;
  std::vector<std::string> states;
};

struct BifProbability {
  std::vector<std::string> vars;  // child first, then parents
  std::vector<double> table;
  std::map<std::vector<std::string>, std::vector<double>> rows;
  std::vector<double> default_row;
};

}  // namespace

Network parse_bif(std::string_view text) {
  BifLexer lex(text);
  std::vector<BifVariable> variables;
  std::unordered_map<std::string, VarIndex> index;
  std::vector<BifProbability> probabilities;

  while (true) {
    const auto tok = lex.next();
    if (tok.empty()) break;
    if (tok == "network") {
      lex.next();  // name
      lex.expect("{");
      int depth = 1;
      while (depth > 0) {
        const auto t = lex.next();
        if (t.empty()) throw ParseError("bif: unterminated network block");
        if (t == "{") ++depth;
        if (t == "}") --depth;
      }
    } else if (tok == "variable") {
      BifVariable var;
      var.name = std::string(lex.next());
      if (var.name.empty()) throw ParseError("bif: variable without a name");
      if (!index.emplace(var.name, variables.size()).second) {
        throw ParseError("bif: duplicate variable '" + var.name + "'");
      }
      lex.expect("{");
      while (true) {
        const auto t = lex.next();
        if (t == "}") break;
        if (t.empty()) throw ParseError("bif: unterminated variable block '" + var.name + "'");
        if (t == "type") {
          if (lex.next() != "discrete") throw ParseError("bif: only discrete variables are supported");
          lex.expect("[");
          const std::string count_tok(lex.next());
          lex.expect("]");
          lex.expect("{");
          while (true) {
            auto s = lex.next();
            if (s == "}") break;
            if (s == ",") continue;
            if (s.empty()) throw ParseError("bif: unterminated state list");
            var.states.emplace_back(s);
          }
          lex.expect(";");
          if (std::to_string(var.states.size()) != count_tok) {
            throw ParseError("bif: variable '" + var.name + "' declares " + count_tok + " states but lists " +
                             std::to_string(var.states.size()));
          }
        } else {
          lex.skip_statement();  // property and other annotations
        }
      }
      variables.push_back(std::move(var));
    } else if (tok == "probability") {
      BifProbability prob;
      lex.expect("(");
      while (true) {
        const auto t = lex.next();
        if (t == ")") break;
        if (t == "|" || t == ",") continue;
        if (t.empty()) throw ParseError("bif: unterminated probability header");
        prob.vars.emplace_back(t);
      }
      if (prob.vars.empty()) throw ParseError("bif: probability block without variables");
      lex.expect("{");
      while (true) {
        const auto t = lex.next();
        if (t == "}") break;
        if (t.empty()) throw ParseError("bif: unterminated probability block");
        auto read_values = [&](std::vector<double>& out) {
          while (true) {
            const auto v = lex.next();
            if (v == ";") break;
            if (v == ",") continue;
            if (v.empty()) throw ParseError("bif: unterminated value list");
            out.push_back(parse_probability(v, lex.line()));
          }
        };
        if (t == "table") {
          read_values(prob.table);
        } else if (t == "default") {
          read_values(prob.default_row);
        } else if (t == "(") {
          std::vector<std::string> config;
          while (true) {
            const auto s = lex.next();
            if (s == ")") break;
            if (s == ",") continue;
            if (s.empty()) throw ParseError("bif: unterminated configuration");
            config.emplace_back(s);
          }
          std::vector<double> values;
          read_values(values);
          if (!prob.rows.emplace(std::move(config), std::move(values)).second) {
            throw ParseError("bif: repeated configuration row for '" + prob.vars.front() + "'");
          }
        } else {
          lex.skip_statement();
        }
      }
      probabilities.push_back(std::move(prob));
    } else {
      throw ParseError("bif: unexpected token '" + std::string(tok) + "' at line " + std::to_string(lex.line()));
    }
  }

  std::vector<NetworkNode> nodes(variables.size());
  std::vector<char> has_cpt(variables.size(), 0);
  for (VarIndex v = 0; v < variables.size(); ++v) {
    nodes[v].name = variables[v].name;
    nodes[v].states = variables[v].states;
  }
  auto lookup = [&](const std::string& name) {
    const auto it = index.find(name);
    if (it == index.end()) throw ParseError("bif: probability block references undeclared variable '" + name + "'");
    return it->second;
  };

  for (const auto& prob : probabilities) {
    const VarIndex child = lookup(prob.vars.front());
    if (has_cpt[child]) throw ParseError("bif: duplicate probability block for '" + prob.vars.front() + "'");
    has_cpt[child] = 1;
    auto& node = nodes[child];
    for (std::size_t i = 1; i < prob.vars.size(); ++i) node.parents.push_back(lookup(prob.vars[i]));
    const std::size_t r = node.states.size();
    std::size_t q = 1;
    for (const VarIndex p : node.parents) q *= nodes[p].states.size();

    node.cpt.assign(q * r, 0.0);
    std::vector<char> covered(q, 0);
    if (!prob.table.empty()) {
      if (prob.table.size() != q * r) {
        throw ValidationError("bif: table for '" + node.name + "' has " + std::to_string(prob.table.size()) +
                              " values, expected " + std::to_string(q * r));
      }
      node.cpt = prob.table;
      std::fill(covered.begin(), covered.end(), 1);
    }
    for (const auto& [config, values] : prob.rows) {
      if (config.size() != node.parents.size()) {
        throw ParseError("bif: configuration arity mismatch for '" + node.name + "'");
      }
      std::size_t j = 0;
      for (std::size_t i = 0; i < config.size(); ++i) {
        const auto& states = nodes[node.parents[i]].states;
        const auto it = std::find(states.begin(), states.end(), config[i]);
        if (it == states.end()) {
          throw ParseError("bif: unknown state label '" + config[i] + "' for '" + nodes[node.parents[i]].name + "'");
        }
        j = j * states.size() + static_cast<std::size_t>(it - states.begin());
      }
      if (values.size() != r) throw ValidationError("bif: CPT dimension mismatch for '" + node.name + "'");
      std::copy(values.begin(), values.end(), node.cpt.begin() + static_cast<std::ptrdiff_t>(j * r));
      covered[j] = 1;
    }
    for (std::size_t j = 0; j < q; ++j) {
      if (covered[j]) continue;
      if (prob.default_row.size() == r) {
        std::copy(prob.default_row.begin(), prob.default_row.end(), node.cpt.begin() + static_cast<std::ptrdiff_t>(j * r));
      } else {
        throw ParseError("bif: missing configuration row " + std::to_string(j) + " for '" + node.name + "'");
      }
    }
  }
  for (VarIndex v = 0; v < nodes.size(); ++v) {
    if (!has_cpt[v]) throw ParseError("bif: no probability block for '" + nodes[v].name + "'");
  }
  return Network(std::move(nodes));
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bif") == 0) return parse_bif(text);
  return parse_network_json(text);
}

// ---------------------------------------------------------------- sampling

Dataset forward_sample(const Network& net, std::size_t num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw Error("forward_sample: sample count must be >= 1");
  const std::size_t n = net.num_nodes();
  std::vector<std::vector<std::int32_t>> columns(n, std::vector<std::int32_t>(num_samples, 0));
  std::vector<std::size_t> config(num_samples);
  for (const VarIndex v : net.topological_order()) {
    const auto& parents = net.node(v).parents;
    std::fill(config.begin(), config.end(), 0);
    for (const VarIndex p : parents) {
      const std::size_t rp = net.arity(p);
      const auto& col = columns[p];
      for (std::size_t i = 0; i < num_samples; ++i) config[i] = config[i] * rp + static_cast<std::size_t>(col[i]);
    }
    Xoshiro256 rng(derive_seed(seed, v));
    const std::size_t r = net.arity(v);
    auto& out = columns[v];
    for (std::size_t i = 0; i < num_samples; ++i) {
      const auto row = net.cpt_row(v, config[i]);
      const double u = rng.uniform();
      // The last state with positive mass absorbs rounding slack in the row sum.
      std::size_t last_positive = 0;
      for (std::size_t s = 0; s < r; ++s)
        if (row[s] > 0.0) last_positive = s;
      double cumulative = 0.0;
      std::size_t k = 0;
      for (; k < last_positive; ++k) {
        cumulative += row[k];
        if (u < cumulative) break;
      }
      out[i] = static_cast<std::int32_t>(k);
    }
  }
  return Dataset(net.names(), net.arities(), std::move(columns));
}

// ---------------------------------------------------------------- d-separation

bool d_separated(const Dag& dag, VarIndex x, VarIndex y, std::span<const VarIndex> z) {
  const std::size_t n = dag.num_nodes();
  if (x >= n || y >= n) throw Error("d_separated: index out of range");
  if (x == y) throw Error("d_separated: x and y must differ");
  std::vector<char> in_z(n, 0);
  for (const VarIndex v : z) {
    if (v >= n) throw Error("d_separated: conditioning index out of range");
    if (v == x || v == y) throw Error("d_separated: x and y must not be in the conditioning set");
    in_z[v] = 1;
  }
  // Ancestors of z, including z.
  std::vector<char> anc(n, 0);
  std::vector<VarIndex> stack(z.begin(), z.end());
  for (const VarIndex v : z) anc[v] = 1;
  while (!stack.empty()) {
    const VarIndex v = stack.back();
    stack.pop_back();
    for (const VarIndex p : dag.parents(v)) {
      if (!anc[p]) {
        anc[p] = 1;
        stack.push_back(p);
      }
    }
  }
  // Reachable search over (node, arrived-from-child?) states.
  enum : std::uint8_t { kUp = 1, kDown = 2 };
  std::vector<std::uint8_t> visited(n, 0);
  std::vector<std::pair<VarIndex, std::uint8_t>> frontier{{x, kUp}};
  while (!frontier.empty()) {
    const auto [v, dir] = frontier.back();
    frontier.pop_back();
    if (visited[v] & dir) continue;
    visited[v] |= dir;
    if (v == y && !in_z[v]) return false;
    if (dir == kUp) {
      if (in_z[v]) continue;
      for (const VarIndex p : dag.parents(v)) frontier.emplace_back(p, kUp);
      for (const VarIndex c : dag.children(v)) frontier.emplace_back(c, kDown);
    } else {
      if (!in_z[v])
        for (const VarIndex c : dag.children(v)) frontier.emplace_back(c, kDown);
      if (anc[v])
        for (const VarIndex p : dag.parents(v)) frontier.emplace_back(p, kUp);
    }
  }
  return true;
}

bool d_separated(const Network& net, VarIndex x, VarIndex y, std::span<const VarIndex> z) {
  return d_separated(net.dag(), x, y, z);
}

std::uint64_t d_connected_mask(const Dag& dag, VarIndex x, std::uint64_t z_mask) {
  const std::size_t n = dag.num_nodes();
  if (n > 64) throw Error("d_connected_mask: graph has more than 64 nodes");
  std::uint64_t pa[64];
  std::uint64_t ch[64];
  for (VarIndex v = 0; v < n; ++v) {
    pa[v] = 0;
    ch[v] = 0;
    for (const VarIndex p : dag.parents(v)) pa[v] |= std::uint64_t{1} << p;
    for (const VarIndex c : dag.children(v)) ch[v] |= std::uint64_t{1} << c;
  }
  return d_connected_mask(std::span<const std::uint64_t>(pa, n), std::span<const std::uint64_t>(ch, n), x, z_mask);
}

std::uint64_t d_connected_mask(std::span<const std::uint64_t> pa, std::span<const std::uint64_t> ch, VarIndex x,
                               std::uint64_t z_mask) {
  if (pa.size() != ch.size() || pa.size() > 64) throw Error("d_connected_mask: bad mask arrays");
  if (x >= pa.size()) throw Error("d_connected_mask: index out of range");
  std::uint64_t anc = z_mask;
  for (std::uint64_t frontier = z_mask; frontier;) {
    std::uint64_t next = 0;
    for (std::uint64_t f = frontier; f; f &= f - 1) next |= pa[__builtin_ctzll(f)];
    frontier = next & ~anc;
    anc |= next;
  }
  std::uint64_t up = 0;
  std::uint64_t down = 0;
  std::uint64_t new_up = std::uint64_t{1} << x;
  std::uint64_t new_down = 0;
  while (new_up | new_down) {
    up |= new_up;
    down |= new_down;
    std::uint64_t next_up = 0;
    std::uint64_t next_down = 0;
    for (std::uint64_t f = new_up & ~z_mask; f; f &= f - 1) {
      const int v = __builtin_ctzll(f);
      next_up |= pa[v];
      next_down |= ch[v];
    }
    for (std::uint64_t f = new_down; f; f &= f - 1) {
      const int v = __builtin_ctzll(f);
      if (!(z_mask >> v & 1)) next_down |= ch[v];
      if (anc >> v & 1) next_up |= pa[v];
    }
    new_up = next_up & ~up;
    new_down = next_down & ~down;
  }
  return (up | down) & ~z_mask & ~(std::uint64_t{1} << x);
}

// ---------------------------------------------------------------- ground truth

VarSet true_pc(const Dag& dag, VarIndex target) {
  if (target >= dag.num_nodes()) throw Error("true_pc: index out of range");
  VarSet out = dag.parents(target);
  out.insert(out.end(), dag.children(target).begin(), dag.children(target).end());
  std::sort(out.begin(), out.end());
  return out;
}

VarSet true_pc(const Network& net, VarIndex target) { return true_pc(net.dag(), target); }

Pdag v_structure_pattern(const Dag& dag) {
  const std::size_t n = dag.num_nodes();
  Pdag out(n);
  for (VarIndex v = 0; v < n; ++v)
    for (const VarIndex p : dag.parents(v)) out.add_undirected(p, v);
  for (VarIndex c = 0; c < n; ++c) {
    const auto& ps = dag.parents(c);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        if (!dag.adjacent(ps[i], ps[j])) {
          out.set_directed(ps[i], c);
          out.set_directed(ps[j], c);
        }
      }
    }
  }
  return out;
}

Pdag cpdag(const Dag& dag) { return meek_orient(v_structure_pattern(dag)); }

Pdag true_local_cpdag(const Dag& dag, VarIndex target) {
  if (target >= dag.num_nodes()) throw Error("true_local_cpdag: index out of range");
  const Pdag full = cpdag(dag);
  Pdag local(dag.num_nodes());
  for (VarIndex v = 0; v < dag.num_nodes(); ++v) {
    if (v == target || !full.adjacent(target, v)) continue;
    if (full.directed(v, target)) {
      local.set_directed(v, target);
    } else if (full.directed(target, v)) {
      local.set_directed(target, v);
    } else {
      local.set_undirected(target, v);
    }
  }
  return local;
}

Pdag true_local_cpdag(const Network& net, VarIndex target) { return true_local_cpdag(net.dag(), target); }

}  // namespace hlcd
