#include "hlcd/oracle_suite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "hlcd/meek.hpp"
#include "hlcd/rng.hpp"
#include "hlcd/scoring.hpp"

namespace hlcd {

// ---------------------------------------------------------------- oracles

namespace {

constexpr std::size_t kFlatTableNodes = 12;
constexpr std::uint64_t kUnset = ~std::uint64_t{0};

}  // namespace

DSeparationTester::DSeparationTester(const Dag& dag) : dag_(dag) {
  const std::size_t n = dag.num_nodes();
  if (n > 58) return;
  parent_masks_.assign(n, 0);
  child_masks_.assign(n, 0);
  for (VarIndex v = 0; v < n; ++v) {
    for (const VarIndex p : dag.parents(v)) parent_masks_[v] |= std::uint64_t{1} << p;
    for (const VarIndex c : dag.children(v)) child_masks_[v] |= std::uint64_t{1} << c;
  }
  if (n <= kFlatTableNodes) table_.assign(n << n, kUnset);
}

CiDecision DSeparationTester::test(VarIndex x, VarIndex y, std::span<const VarIndex> z) {
  const std::size_t n = dag_.num_nodes();
  bool separated = false;
  if (n <= 58) {
    if (x >= n || y >= n || x == y) throw Error("d-separation oracle: invalid pair");
    std::uint64_t z_mask = 0;
    for (const VarIndex v : z) {
      if (v >= n || v == x || v == y) throw Error("d-separation oracle: invalid conditioning set");
      z_mask |= std::uint64_t{1} << v;
    }
    auto sweep = [&] {
      ++tests_run_;
      return d_connected_mask(parent_masks_, child_masks_, x, z_mask);
    };
    std::uint64_t reach;
    if (!table_.empty()) {
      std::uint64_t& slot = table_[z_mask * n + x];
      if (slot == kUnset) slot = sweep();
      reach = slot;
    } else {
      const std::uint64_t key = (z_mask << 6) | x;
      auto it = sweeps_.find(key);
      if (it == sweeps_.end()) it = sweeps_.emplace(key, sweep()).first;
      reach = it->second;
    }
    separated = !(reach >> y & 1);
  } else {
    ++tests_run_;
    separated = d_separated(dag_, x, y, z);
  }
  return separated ? CiDecision{true, 1.0, 0.0} : CiDecision{false, 0.0, 1.0};
}

GraphLearner::GraphLearner(const Dag& dag, const PcOptions& options)
    : dag_(dag), options_(options), tester_(dag), pc_cache_(dag.num_nodes()) {
  if (options_.algorithm == PcAlgorithm::kFcbf) throw Error("graph oracle: FCBF has no d-separation form");
}

VarSet GraphLearner::parents_and_children(VarIndex z, Diagnostics& diag) {
  if (pc_cache_[z]) return *pc_cache_[z];
  const std::size_t before = tester_.tests_run();
  VarSet pc = options_.algorithm == PcAlgorithm::kHitonPc ? hiton_pc(tester_, z, options_)
                                                          : pc_simple(tester_, z, options_);
  diag.ci_tests += tester_.tests_run() - before;
  pc_cache_[z] = pc;
  return pc;
}

bool GraphLearner::keep_candidate(VarIndex z, VarIndex x, Diagnostics&) {
  const auto pm = tester_.parent_masks();
  if (pm.empty()) return dag_.adjacent(z, x);
  return (pm[z] >> x & 1) || (pm[x] >> z & 1);
}

double GraphLearner::collider_score(VarIndex x, VarIndex z, VarIndex y, Diagnostics&) {
  const auto pm = tester_.parent_masks();
  bool collider;
  if (pm.empty()) {
    collider = dag_.has_edge(x, z) && dag_.has_edge(y, z) && !dag_.adjacent(x, y);
  } else {
    collider = (pm[z] >> x & 1) && (pm[z] >> y & 1) && !(pm[x] >> y & 1) && !(pm[y] >> x & 1);
  }
  return collider ? 1.0 : -1.0;
}

LocalDiscoveryResult oracle_discover(const Dag& dag, VarIndex target, const HlcdOptions& options) {
  GraphLearner learner(dag, options.pc);
  return discover(learner, target, options);
}

LocalDiscoveryResult oracle_discover(const Network& net, VarIndex target, const HlcdOptions& options) {
  return oracle_discover(net.dag(), target, options);
}

// ---------------------------------------------------------------- enumeration

std::uint64_t count_dags(std::size_t k) {
  std::vector<std::uint64_t> a(k + 1, 0);
  a[0] = 1;
  auto binom = [](std::size_t n, std::size_t r) {
    std::uint64_t c = 1;
    for (std::size_t i = 1; i <= r; ++i) c = c * (n - r + i) / i;
    return c;
  };
  for (std::size_t n = 1; n <= k; ++n) {
    std::int64_t sum = 0;
    for (std::size_t j = 1; j <= n; ++j) {
      const std::int64_t term =
          static_cast<std::int64_t>(binom(n, j) * (std::uint64_t{1} << (j * (n - j))) * a[n - j]);
      sum += (j % 2 == 1) ? term : -term;
    }
    a[n] = static_cast<std::uint64_t>(sum);
  }
  return a[k];
}

void enumerate_dag_masks(std::size_t k, const std::function<void(std::span<const std::uint64_t>)>& visit) {
  if (k > 8) throw Error("enumerate_dags: at most 8 nodes");
  if (k == 0) return;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  const std::size_t m = pairs.size();
  std::vector<std::uint8_t> digit(m, 0);  // 0 none, 1 i->j, 2 j->i
  std::vector<std::uint64_t> pm(k, 0);
  const std::uint64_t all = (std::uint64_t{1} << k) - 1;
  while (true) {
    std::uint64_t remaining = all;
    bool progress = true;
    while (remaining && progress) {
      progress = false;
      for (std::uint64_t r = remaining; r; r &= r - 1) {
        const int v = __builtin_ctzll(r);
        if ((pm[static_cast<std::size_t>(v)] & remaining) == 0) {
          remaining &= ~(std::uint64_t{1} << v);
          progress = true;
        }
      }
    }
    if (!remaining) visit(pm);

    // Odometer step, keeping pm in sync.
    std::size_t p = 0;
    for (; p < m; ++p) {
      const auto [i, j] = pairs[p];
      if (digit[p] == 1) pm[j] &= ~(std::uint64_t{1} << i);
      if (digit[p] == 2) pm[i] &= ~(std::uint64_t{1} << j);
      digit[p] = static_cast<std::uint8_t>((digit[p] + 1) % 3);
      if (digit[p] == 1) pm[j] |= std::uint64_t{1} << i;
      if (digit[p] == 2) pm[i] |= std::uint64_t{1} << j;
      if (digit[p] != 0) break;
    }
    if (p == m) break;
  }
}

Dag dag_from_masks(std::span<const std::uint64_t> parent_masks) {
  Dag dag(parent_masks.size());
  for (VarIndex v = 0; v < parent_masks.size(); ++v)
    for (std::uint64_t m = parent_masks[v]; m; m &= m - 1) dag.add_edge(static_cast<VarIndex>(__builtin_ctzll(m)), v);
  return dag;
}

void enumerate_dags(std::size_t k, const std::function<void(const Dag&)>& visit) {
  enumerate_dag_masks(k, [&](std::span<const std::uint64_t> pm) { visit(dag_from_masks(pm)); });
}

namespace {

// Two bits per unordered pair (u < v): 0 none, 1 undirected, 2 u->v, 3 v->u.
std::uint64_t encode(const Pdag& g) {
  std::uint64_t code = 0;
  std::size_t shift = 0;
  for (VarIndex u = 0; u < g.num_nodes(); ++u) {
    for (VarIndex v = u + 1; v < g.num_nodes(); ++v, shift += 2) {
      std::uint64_t mark = 0;
      if (g.undirected(u, v)) mark = 1;
      else if (g.directed(u, v)) mark = 2;
      else if (g.directed(v, u)) mark = 3;
      code |= mark << shift;
    }
  }
  return code;
}

}  // namespace

Pdag brute_force_cpdag(const Dag& dag) {
  const std::size_t n = dag.num_nodes();
  if (n > 64) throw Error("brute_force_cpdag: more than 64 nodes");
  std::vector<std::pair<VarIndex, VarIndex>> edges;
  for (VarIndex v = 0; v < n; ++v)
    for (const VarIndex p : dag.parents(v)) edges.emplace_back(std::min(p, v), std::max(p, v));
  std::sort(edges.begin(), edges.end());
  if (edges.size() > 20) throw Error("brute_force_cpdag: more than 20 edges");

  const Pdag reference = v_structure_pattern(dag);
  std::vector<char> seen_forward(edges.size(), 0);
  std::vector<char> seen_backward(edges.size(), 0);
  std::vector<std::uint64_t> pm(n);
  for (std::uint64_t orient = 0; orient < (std::uint64_t{1} << edges.size()); ++orient) {
    std::fill(pm.begin(), pm.end(), 0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto [u, v] = edges[e];
      if (orient >> e & 1) pm[u] |= std::uint64_t{1} << v;
      else pm[v] |= std::uint64_t{1} << u;
    }
    const Dag candidate = dag_from_masks(pm);
    if (!candidate.is_acyclic() || !(v_structure_pattern(candidate) == reference)) continue;
    for (std::size_t e = 0; e < edges.size(); ++e) (orient >> e & 1 ? seen_backward : seen_forward)[e] = 1;
  }
  Pdag out(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    if (seen_forward[e] && seen_backward[e]) out.set_undirected(u, v);
    else if (seen_forward[e]) out.set_directed(u, v);
    else out.set_directed(v, u);
  }
  return out;
}

std::vector<std::vector<Dag>> equivalence_classes(std::size_t k) {
  if (k > 5) throw Error("equivalence_classes: at most 5 nodes");
  std::map<std::uint64_t, std::vector<Dag>> groups;
  enumerate_dags(k, [&](const Dag& dag) { groups[encode(v_structure_pattern(dag))].push_back(dag); });
  std::vector<std::vector<Dag>> out;
  out.reserve(groups.size());
  for (auto& [key, members] : groups) out.push_back(std::move(members));
  return out;
}

// ---------------------------------------------------------------- fuzzing

double FuzzReport::max_deviation() const {
  return std::max({theorem1_gain_symmetry, collider_symmetry, aic_gain_vs_mi, equivalence_ties});
}

namespace {

double relative_gap(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

Dataset random_dataset(Xoshiro256& rng, std::size_t num_vars, const FuzzOptions& options) {
  auto uniform_int = [&](std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
  };
  const std::size_t rows = uniform_int(options.min_rows, options.max_rows);
  std::vector<std::size_t> arities(num_vars);
  std::vector<std::string> names(num_vars);
  std::vector<std::vector<std::int32_t>> columns(num_vars, std::vector<std::int32_t>(rows));
  for (std::size_t v = 0; v < num_vars; ++v) {
    arities[v] = uniform_int(options.min_arity, options.max_arity);
    names[v] = "V" + std::to_string(v);
    // Either fresh noise with a skewed marginal or a noisy function of an
    // earlier column.
    const bool dependent = v > 0 && (rng() & 1);
    const std::size_t source = dependent ? static_cast<std::size_t>(rng() % v) : 0;
    const double keep = rng.uniform();
    const double skew = rng.uniform();
    for (std::size_t i = 0; i < rows; ++i) {
      std::int32_t value;
      if (dependent && rng.uniform() < keep) {
        value = static_cast<std::int32_t>(static_cast<std::size_t>(columns[source][i]) % arities[v]);
      } else if (rng.uniform() < skew) {
        value = 0;
      } else {
        value = static_cast<std::int32_t>(rng() % arities[v]);
      }
      columns[v][i] = value;
    }
  }
  return Dataset(std::move(names), std::move(arities), std::move(columns));
}

// Restriction of a DAG on k nodes to the first k columns of a wider dataset.
Dataset first_columns(const Dataset& data, std::size_t k) {
  std::vector<std::string> names(data.names().begin(), data.names().begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<std::size_t> arities(data.arities().begin(), data.arities().begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<std::vector<std::int32_t>> columns;
  for (std::size_t v = 0; v < k; ++v) columns.emplace_back(data.column(v).begin(), data.column(v).end());
  return Dataset(std::move(names), std::move(arities), std::move(columns));
}

}  // namespace

FuzzReport fuzz_score_identities(std::size_t trials, std::uint64_t seed, const FuzzOptions& options) {
  FuzzReport report;
  if (trials == 0) return report;
  const std::size_t num_vars = std::max<std::size_t>(3, options.equivalence_nodes);
  std::vector<std::vector<std::vector<Dag>>> classes(options.equivalence_nodes + 1);
  for (std::size_t k = 2; k <= options.equivalence_nodes; ++k) classes[k] = equivalence_classes(k);

  for (std::size_t trial = 0; trial < trials; ++trial) {
    Xoshiro256 rng(derive_seed(seed, trial));
    const Dataset data = random_dataset(rng, num_vars, options);
    const double n = static_cast<double>(data.num_rows());
    for (const Criterion criterion : {Criterion::kAic, Criterion::kBdeu}) {
      ScoreConfig config;
      config.criterion = criterion;
      ScoreCache cache(data, config);
      for (VarIndex x = 0; x < num_vars; ++x) {
        for (VarIndex t = 0; t < num_vars; ++t) {
          if (x == t) continue;
          const double g_xt = gain(cache, x, t);
          const double g_tx = gain(cache, t, x);
          report.theorem1_gain_symmetry = std::max(report.theorem1_gain_symmetry, relative_gap(g_xt, g_tx));
          if (criterion == Criterion::kAic) {
            const double penalty = static_cast<double>((data.arity(x) - 1) * (data.arity(t) - 1));
            const double expected = n * mutual_information(data, x, t) - penalty;
            report.aic_gain_vs_mi = std::max(report.aic_gain_vs_mi, relative_gap(g_xt, expected));
          }
          for (VarIndex y = x + 1; y < num_vars; ++y) {
            if (y == t) continue;
            report.collider_symmetry = std::max(
                report.collider_symmetry,
                relative_gap(collider_statistic(cache, x, t, y), collider_statistic(cache, y, t, x)));
          }
        }
      }
      for (std::size_t k = 2; k <= options.equivalence_nodes; ++k) {
        const Dataset sub = k == num_vars ? data : first_columns(data, k);
        ScoreCache sub_cache(sub, config);
        for (const auto& members : classes[k]) {
          const double first = graph_score(sub_cache, members.front());
          for (std::size_t i = 1; i < members.size(); ++i) {
            report.equivalence_ties =
                std::max(report.equivalence_ties, relative_gap(first, graph_score(sub_cache, members[i])));
          }
        }
      }
    }
    ++report.trials;
  }
  return report;
}

// ---------------------------------------------------------------- verify

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

namespace {

std::string describe(const LocalDiscoveryResult& r) {
  auto list = [](const VarSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + "}";
  };
  return "parents=" + list(r.parents) + " children=" + list(r.children) + " undirected=" + list(r.undirected);
}

// The learned PDAG agrees with the truth on every edge at t.
bool matches(const LocalDiscoveryResult& r, const Pdag& truth_cpdag, VarIndex t) {
  for (VarIndex v = 0; v < truth_cpdag.num_nodes(); ++v)
    if (v != t && r.pdag.mark(t, v) != truth_cpdag.mark(t, v)) return false;
  return true;
}

std::string masks_text(std::span<const std::uint64_t> pm) {
  std::ostringstream os;
  os << "DAG edges:";
  for (std::size_t v = 0; v < pm.size(); ++v)
    for (std::uint64_t m = pm[v]; m; m &= m - 1) os << ' ' << __builtin_ctzll(m) << "->" << v;
  return os.str();
}

}  // namespace

VerifyReport verify(const VerifyOptions& options, const std::function<void(const std::string&)>& log) {
  VerifyReport report;
  auto record = [&](VerifyCheck check) {
    if (log) log(std::string(check.passed ? "[PASS] " : "[FAIL] ") + check.name + ": " + check.detail);
    report.checks.push_back(std::move(check));
  };

  const std::size_t threads = std::max<std::size_t>(1, options.threads);
  for (std::size_t k = 1; k <= options.max_nodes; ++k) {
    // Per equivalence class: the Meek CPDAG code of its first member and the
    // orientations seen across all members.
    struct ClassInfo {
      std::uint64_t meek_code;
      std::uint64_t orientations;
      std::uint64_t skeleton;
    };
    struct Shard {
      std::uint64_t dags = 0;
      std::uint64_t runs = 0;
      std::uint64_t discover_failures = 0;
      std::uint64_t meek_failures = 0;
      std::uint64_t first_index = ~std::uint64_t{0};
      std::string first_failure;
      std::unordered_map<std::uint64_t, ClassInfo> classes;
      std::exception_ptr error;

      void fail(std::uint64_t index, std::string text) {
        if (index < first_index) {
          first_index = index;
          first_failure = std::move(text);
        }
      }
    };
    std::vector<Shard> shards(threads);

    // Shard s handles the DAGs whose enumeration index is s modulo threads.
    auto work = [&](std::size_t s) {
      Shard& shard = shards[s];
      try {
        std::uint64_t index = 0;
        enumerate_dag_masks(k, [&](std::span<const std::uint64_t> pm) {
          const std::uint64_t my_index = index++;
          if (my_index % threads != s) return;
          ++shard.dags;
          const Dag dag = dag_from_masks(pm);
          const Pdag pattern = v_structure_pattern(dag);
          const Pdag truth = meek_orient(pattern);
          const std::uint64_t meek_code = encode(truth);

          std::uint64_t orientations = 0;
          std::uint64_t skeleton = 0;
          std::size_t pair = 0;
          for (VarIndex u = 0; u < k; ++u) {
            for (VarIndex v = u + 1; v < k; ++v, ++pair) {
              const bool forward = pm[v] >> u & 1;
              const bool backward = pm[u] >> v & 1;
              if (forward) orientations |= std::uint64_t{1} << (2 * pair);
              if (backward) orientations |= std::uint64_t{1} << (2 * pair + 1);
              if (forward || backward) skeleton |= std::uint64_t{1} << pair;
            }
          }
          auto [it, inserted] = shard.classes.emplace(encode(pattern), ClassInfo{meek_code, orientations, skeleton});
          if (!inserted) {
            if (it->second.meek_code != meek_code) {
              ++shard.meek_failures;
              shard.fail(my_index, "Meek CPDAG differs within a class; " + masks_text(pm));
            }
            it->second.orientations |= orientations;
          }

          GraphLearner learner(dag, options.hlcd.pc);
          for (VarIndex t = 0; t < k; ++t) {
            ++shard.runs;
            const LocalDiscoveryResult r = discover(learner, t, options.hlcd);
            if (!matches(r, truth, t)) {
              ++shard.discover_failures;
              shard.fail(my_index, masks_text(pm) + ", target " + std::to_string(t) + ": got " + describe(r));
            }
          }
        });
      } catch (...) {
        shard.error = std::current_exception();
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t s = 0; s < threads; ++s) pool.emplace_back(work, s);
      for (auto& t : pool) t.join();
    }
    for (const Shard& shard : shards)
      if (shard.error) std::rethrow_exception(shard.error);

    Shard total = std::move(shards[0]);
    for (std::size_t s = 1; s < threads; ++s) {
      Shard& shard = shards[s];
      total.dags += shard.dags;
      total.runs += shard.runs;
      total.discover_failures += shard.discover_failures;
      total.meek_failures += shard.meek_failures;
      total.fail(shard.first_index, std::move(shard.first_failure));
      for (const auto& [key, info] : shard.classes) {
        auto [it, inserted] = total.classes.emplace(key, info);
        if (inserted) continue;
        if (it->second.meek_code != info.meek_code) {
          ++total.meek_failures;
          total.fail(~std::uint64_t{0} - 1, "Meek CPDAG differs within a class");
        }
        it->second.orientations |= info.orientations;
      }
      shard.classes.clear();
    }
    const std::uint64_t dags = total.dags;
    const std::uint64_t runs = total.runs;
    const std::uint64_t discover_failures = total.discover_failures;
    std::uint64_t meek_failures = total.meek_failures;
    std::string first_failure = total.first_failure;
    const auto& classes = total.classes;

    // Brute-force CPDAG per class vs the Meek CPDAG.
    for (const auto& [key, info] : classes) {
      std::uint64_t brute = 0;
      std::size_t pair = 0;
      for (VarIndex u = 0; u < k; ++u) {
        for (VarIndex v = u + 1; v < k; ++v, ++pair) {
          if (!(info.skeleton >> pair & 1)) continue;
          const bool fwd = info.orientations >> (2 * pair) & 1;
          const bool bwd = info.orientations >> (2 * pair + 1) & 1;
          const std::uint64_t mark = fwd && bwd ? 1 : (fwd ? 2 : 3);
          brute |= mark << (2 * pair);
        }
      }
      if (brute != info.meek_code) {
        ++meek_failures;
        if (first_failure.empty()) first_failure = "brute-force CPDAG differs from Meek closure";
      }
    }

    const bool count_ok = dags == count_dags(k);
    VerifyCheck check;
    check.name = "oracle discovery on all DAGs with " + std::to_string(k) + " node" + (k == 1 ? "" : "s");
    check.passed = count_ok && discover_failures == 0 && meek_failures == 0;
    check.detail = std::to_string(dags) + " DAGs, " + std::to_string(classes.size()) + " classes, " +
                   std::to_string(runs) + " discoveries, " + std::to_string(discover_failures) +
                   " mismatches, " + std::to_string(meek_failures) + " CPDAG disagreements";
    if (!count_ok) check.detail += ", expected " + std::to_string(count_dags(k)) + " DAGs";
    if (!first_failure.empty()) check.detail += "; first: " + first_failure;
    record(std::move(check));
  }

  for (const auto& path : options.network_paths) {
    VerifyCheck check;
    check.name = "oracle discovery on " + path;
    try {
      const Network net = load_network_file(path);
      const Pdag truth = cpdag(net.dag());
      GraphLearner learner(net.dag(), options.hlcd.pc);
      std::size_t failures = 0;
      std::string first;
      for (VarIndex t = 0; t < net.num_nodes(); ++t) {
        const LocalDiscoveryResult r = discover(learner, t, options.hlcd);
        if (!matches(r, truth, t)) {
          ++failures;
          if (first.empty()) first = net.node(t).name + ": got " + describe(r);
        }
      }
      check.passed = failures == 0;
      check.detail = std::to_string(net.num_nodes()) + " targets, " + std::to_string(failures) + " mismatches";
      if (!first.empty()) check.detail += "; first: " + first;
    } catch (const std::exception& e) {
      check.passed = false;
      check.detail = e.what();
    }
    record(std::move(check));
  }

  if (options.fuzz_trials > 0) {
    const FuzzReport fuzz = fuzz_score_identities(options.fuzz_trials, options.seed);
    VerifyCheck check;
    check.name = "score identities over " + std::to_string(fuzz.trials) + " random datasets";
    check.passed = fuzz.max_deviation() <= 1e-9;
    std::ostringstream os;
    os.precision(3);
    os << "max relative deviation: gain symmetry " << fuzz.theorem1_gain_symmetry << ", collider symmetry "
       << fuzz.collider_symmetry << ", AIC gain vs MI " << fuzz.aic_gain_vs_mi << ", equivalence ties "
       << fuzz.equivalence_ties;
    check.detail = os.str();
    record(std::move(check));
  }
  return report;
}

}  // namespace hlcd
