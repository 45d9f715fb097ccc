// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "hlcd/benchmark.hpp"
#include "hlcd/graph_eval.hpp"
#include "hlcd/hlcd_engine.hpp"
#include "hlcd/independence.hpp"
#include "hlcd/oracle_suite.hpp"
#include "hlcd/rng.hpp"
#include "hlcd/scoring.hpp"
#include "support.hpp"

namespace {

using namespace hlcd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << detail << std::endl;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int decimals = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << x;
  return os.str();
}

std::string sci(double x) {
  std::ostringstream os;
  os << std::scientific;
  os.precision(2);
  os << x;
  return os.str();
}

const Network& alarm() {
  static const Network net = load_network_file(HLCD_DATA_DIR "/networks/alarm.bif");
  return net;
}

void oracle_correctness() {
  VerifyOptions options;
  options.max_nodes = 6;
  options.fuzz_trials = 0;
  options.threads = resolve_threads(0);
  options.network_paths = {HLCD_DATA_DIR "/networks/alarm.bif"};
  const auto start = Clock::now();
  std::string failed;
  const VerifyReport r = verify(options, [&](const std::string& line) {
    if (line.rfind("[FAIL]", 0) == 0) failed += line + "; ";
  });
  const double t = seconds_since(start);
  report(1, "oracle recovers the local CPDAG on all DAGs up to 6 nodes and on Alarm", r.passed() && t < 120.0,
         std::to_string(r.checks.size()) + " checks, " + (r.passed() ? "no mismatches" : failed) + ", " +
             fmt(t, 1) + " s on " + std::to_string(options.threads) + " thread(s), limit 120 s");
}

void gain_symmetry() {
  FuzzOptions options;
  options.equivalence_nodes = 0;
  const FuzzReport r = fuzz_score_identities(1000, 2024, options);
  report(2, "gain(x,t) equals gain(t,x) on 1000 fuzzed datasets", r.trials == 1000 && r.theorem1_gain_symmetry <= 1e-9,
         "max relative deviation " + sci(r.theorem1_gain_symmetry) + ", limit 1e-9");
}

Dataset random_dataset(std::size_t k, Xoshiro256& rng) {
  const std::size_t n = 4 + rng() % 497;
  std::vector<std::size_t> arities(k);
  for (auto& a : arities) a = 2 + rng() % 3;
  std::vector<std::vector<std::int32_t>> cols(k);
  for (std::size_t v = 0; v < k; ++v)
    for (std::size_t i = 0; i < n; ++i) cols[v].push_back(static_cast<std::int32_t>(rng() % arities[v]));
  std::vector<std::string> names;
  for (std::size_t v = 0; v < k; ++v) names.push_back("V" + std::to_string(v));
  return Dataset(std::move(names), std::move(arities), std::move(cols));
}

void equivalence_ties() {
  Xoshiro256 rng(77);
  double worst = 0.0;
  std::size_t compared = 0;
  for (std::size_t k = 2; k <= 4; ++k) {
    const auto classes = equivalence_classes(k);
    for (int d = 0; d < 100; ++d) {
      const Dataset data = random_dataset(k, rng);
      for (const Criterion c : {Criterion::kAic, Criterion::kBdeu}) {
        ScoreConfig config;
        config.criterion = c;
        ScoreCache cache(data, config);
        for (const auto& members : classes) {
          const double first = graph_score(cache, members.front());
          for (const Dag& m : members) {
            const double s = graph_score(cache, m);
            worst = std::max(worst, std::abs(s - first) / std::max({1.0, std::abs(s), std::abs(first)}));
            ++compared;
          }
        }
      }
    }
  }
  report(3, "equivalent DAGs on up to 4 nodes tie in score (AIC and BDeu, 100 datasets per size)", worst <= 1e-9,
         std::to_string(compared) + " scores compared, max relative deviation " + sci(worst));
}

void collider_discrimination() {
  const Network collider = test::xor_network(test::make_dag(3, {{0, 1}, {2, 1}}), 0.1);
  const Network chain = test::xor_network(test::make_dag(3, {{0, 1}, {1, 2}}), 0.1);
  const ScoreConfig config;
  int positive = 0;
  int negative = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    if (collider_statistic(forward_sample(collider, 5000, seed), 0, 1, 2, config) > 0) ++positive;
    if (collider_statistic(forward_sample(chain, 5000, 1000 + seed), 0, 1, 2, config) < 0) ++negative;
  }
  report(4, "collider statistic separates a noisy-XOR collider from a chain at N=5000", positive >= 95 && negative >= 95,
         "collider > 0 in " + std::to_string(positive) + "/100, chain < 0 in " + std::to_string(negative) +
             "/100, need 95 each");
}

MetricSummary benchmark_summary(const Network& net, const std::string& name, std::size_t threads) {
  BenchmarkConfig c;
  c.network_name = name;
  c.sizes = {500};
  c.replicates = 10;
  c.threads = threads;
  c.hlcd.pc.algorithm = PcAlgorithm::kPcSimple;
  c.hlcd.pc.alpha = 0.01;
  return run_benchmark(net, c).summaries.front().summary;
}

void reference_numbers() {
  const std::size_t threads = resolve_threads(0);
  const MetricSummary a = benchmark_summary(alarm(), "alarm", threads);
  const bool alarm_ok = std::abs(a.f1.mean - 0.60) <= 0.10 && std::abs(a.shd.mean - 1.34) <= 0.35;
  report(5, "Alarm n=500 x10, HLCD-P, BDeu: F1 0.60+-0.10 and SHD 1.34+-0.35", alarm_ok,
         "F1 " + a.f1.format() + ", SHD " + a.shd.format());

  const Network child = load_network_file(HLCD_DATA_DIR "/networks/child.bif");
  const MetricSummary c = benchmark_summary(child, "child", threads);
  report(5, "Child n=500 x10, HLCD-P, BDeu: F1 0.70+-0.10", std::abs(c.f1.mean - 0.70) <= 0.10,
         "F1 " + c.f1.format() + ", SHD " + c.shd.format() + ", undirected " + c.undirected.format() +
             ", reversed " + c.reversed.format());
}

AblationRow theorem1_ablation(const Network& net) {
  AblationConfig c;
  c.network_name = "five";
  c.sizes = {50000};
  c.replicates = 3;
  return run_ablation(net, c).rows.front();
}

// The predicate keeps a pair iff the pair is marginally dependent, so only
// non-adjacent pairs that are marginally independent can be removed. The
// spouse network has that shape; the chain network is reported alongside.
void ablation_sanity() {
  const Network spouses = test::or_network(test::make_dag(5, {{0, 2}, {1, 2}, {3, 2}, {4, 2}}), 0.1);
  const Network chained = test::or_network(test::make_dag(5, {{0, 2}, {1, 2}, {2, 3}, {3, 4}}), 0.1);
  const AblationRow row = theorem1_ablation(spouses);
  const AblationRow other = theorem1_ablation(chained);
  report(6, "score-based PC pruning on a 5-node network (4 parents of one child) at N=50000",
         row.get_pc.mean >= 0.95 && row.delete_nopc.mean >= 0.90,
         "Get_PC " + fmt(row.get_pc.mean) + " (need 0.95), Delete_NoPC " + fmt(row.delete_nopc.mean) +
             " (need 0.90); collider-then-chain network: Get_PC " + fmt(other.get_pc.mean) + ", Delete_NoPC " +
             fmt(other.delete_nopc.mean));
}

void ci_calibration() {
  Xoshiro256 rng(99);
  int rejected = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    std::vector<std::vector<std::int32_t>> cols(2);
    for (int i = 0; i < 1000; ++i) {
      cols[0].push_back(static_cast<std::int32_t>(rng() & 1));
      cols[1].push_back(static_cast<std::int32_t>(rng() & 1));
    }
    const Dataset d({"X", "Y"}, {2, 2}, std::move(cols));
    if (!is_independent(g2_test(d, 0, 1, {}), 0.01)) ++rejected;
  }
  const double rate = rejected / 1000.0;
  report(7, "G2 test at alpha=0.01 on 1000 independent binary pairs (N=1000)", std::abs(rate - 0.01) <= 0.01,
         "rejection rate " + fmt(rate) + ", target 0.010+-0.010");
}

void performance() {
  const Dataset d = forward_sample(alarm(), 500, replicate_seed(1, 500, 0));
  double worst = 0.0;
  for (VarIndex t = 0; t < d.num_variables(); ++t) {
    const auto start = Clock::now();
    discover(d, t, HlcdOptions{});
    worst = std::max(worst, seconds_since(start));
  }
  report(8, "single-target discover on Alarm n=500 under 1 s", worst < 1.0,
         "slowest of 37 targets " + fmt(worst) + " s");

  BenchmarkConfig c;
  c.network_name = "alarm";
  c.sizes = {500, 1000};
  c.replicates = 10;
  c.threads = resolve_threads(8);
  const auto start = Clock::now();
  const BenchmarkResult r = run_benchmark(alarm(), c);
  const double t = seconds_since(start);
  report(8, "full Alarm benchmark (10 replicates x 2 sizes x 37 targets) under 120 s", t < 120.0 && r.rows.size() == 740,
         std::to_string(r.rows.size()) + " rows in " + fmt(t, 1) + " s with " + std::to_string(c.threads) +
             " thread(s), " + std::to_string(std::thread::hardware_concurrency()) + " core(s) available");
}

struct Captured {
  int code = -1;
  std::string out;
};

Captured run_cli(const std::string& args) {
  Captured r;
  FILE* pipe = ::popen((std::string(HLCD_CLI) + " " + args + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (const std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void determinism() {
  const fs::path dir = fs::temp_directory_path() / "hlcd_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string net = HLCD_DATA_DIR "/networks/alarm.bif";
  const std::string data = (dir / "d.csv").string();
  std::vector<std::string> mismatched;

  auto twice = [&](const std::string& name, const std::function<std::string(int)>& args, const std::string& file) {
    std::string outputs[2];
    for (int i = 0; i < 2; ++i) {
      const Captured c = run_cli(args(i));
      outputs[i] = std::to_string(c.code) + "\n" + c.out;
      if (!file.empty()) outputs[i] += slurp(dir / (file + std::to_string(i)));
      if (c.code != 0) mismatched.push_back(name + " exited " + std::to_string(c.code));
    }
    if (outputs[0] != outputs[1]) mismatched.push_back(name);
  };

  auto file = [&](const std::string& f, int i) { return (dir / (f + std::to_string(i))).string(); };
  twice("sample", [&](int i) { return "sample --net " + net + " -n 500 --seed 3 --out " + file("s", i); }, "s");
  run_cli("sample --net " + net + " -n 500 --seed 3 --out " + data);
  twice("discover", [&](int) { return "discover --data " + data + " --target HR"; }, "");
  twice("benchmark",
        [&](int i) {
          return "benchmark --net " + net + " --sizes 300,500 --reps 3 --threads " + std::to_string(1 + 3 * i) +
                 " --out " + file("b", i);
        },
        "b");
  twice("ablate",
        [&](int i) { return "ablate --net " + net + " --sizes 500 --reps 2 --threads " + std::to_string(1 + 3 * i); },
        "");
  twice("verify",
        [&](int i) { return "verify --max-nodes 4 --fuzz-trials 50 --threads " + std::to_string(1 + i); }, "");
  fs::remove_all(dir);

  std::string detail = "sample, discover, benchmark, ablate, verify run twice (threads 1 vs 4 where applicable)";
  if (!mismatched.empty()) {
    detail = "differs:";
    for (const auto& m : mismatched) detail += " " + m;
  }
  report(9, "byte-identical CLI output across runs and thread counts", mismatched.empty(), detail);
}

}  // namespace

// With arguments, runs only the listed criterion numbers.
int main(int argc, char** argv) {
  const std::vector<std::function<void()>> criteria = {oracle_correctness, gain_symmetry,   equivalence_ties,
                                                       collider_discrimination, reference_numbers, ablation_sanity,
                                                       ci_calibration,     performance,     determinism};
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id >= 1 && id <= static_cast<int>(criteria.size())) selected[id - 1] = true;
  }
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL  criterion threw: " << e.what() << std::endl;
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion check(s) failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
