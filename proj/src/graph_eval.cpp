#include "hlcd/graph_eval.hpp"

#include <cmath>
#include <cstdio>

namespace hlcd {

MetricRow local_metrics(const LocalDiscoveryResult& result, std::span<const std::string> learned_names,
                        const Network& truth, const MetricOptions& options) {
  if (learned_names.size() != result.pdag.num_nodes()) throw Error("local_metrics: name list does not match result");
  std::vector<VarIndex> to_truth(learned_names.size());
  for (VarIndex v = 0; v < learned_names.size(); ++v) {
    try {
      to_truth[v] = truth.index_of(learned_names[v]);
    } catch (const Error&) {
      throw Error("local_metrics: name mismatch, '" + learned_names[v] + "' is not in the network");
    }
  }
  const Dag& dag = truth.dag();
  const VarIndex t = to_truth[result.target];

  MetricRow row;
  std::size_t correct = 0;
  std::size_t learned = 0;
  std::vector<char> learned_adjacent(truth.num_nodes(), 0);

  auto directed = [&](VarIndex from, VarIndex to) {
    ++learned;
    learned_adjacent[from == t ? to : from] = 1;
    if (dag.has_edge(from, to)) {
      ++correct;
    } else if (dag.has_edge(to, from)) {
      row.shd.reversed += 1;
    } else {
      row.shd.extra += 1;
    }
  };
  for (const VarIndex p : result.parents) directed(to_truth[p], t);
  for (const VarIndex c : result.children) directed(t, to_truth[c]);
  for (const VarIndex u : result.undirected) {
    const VarIndex v = to_truth[u];
    ++learned;
    learned_adjacent[v] = 1;
    if (dag.adjacent(t, v)) {
      row.shd.undirected += 1;
      if (options.credit_undirected) ++correct;
    } else {
      row.shd.extra += 1;
    }
  }
  std::size_t truth_edges = 0;
  for (VarIndex v = 0; v < truth.num_nodes(); ++v) {
    if (v == t || !dag.adjacent(t, v)) continue;
    ++truth_edges;
    if (!learned_adjacent[v]) row.shd.missing += 1;
  }
  row.precision = learned ? static_cast<double>(correct) / static_cast<double>(learned) : 0.0;
  row.recall = truth_edges ? static_cast<double>(correct) / static_cast<double>(truth_edges) : 0.0;
  const double pr = row.precision + row.recall;
  row.f1 = pr > 0.0 ? 2.0 * row.precision * row.recall / pr : 0.0;
  return row;
}

std::string MeanStd::format(int decimals) const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f\xC2\xB1%.*f", decimals, mean, decimals, std);
  return buf;
}

MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (const double x : xs) sq += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(xs.size()));
  return out;
}

MetricSummary aggregate(const std::vector<std::vector<MetricRow>>& rows) {
  constexpr std::size_t kMetrics = 9;
  std::vector<std::vector<double>> means(kMetrics);
  for (const auto& replicate : rows) {
    if (replicate.empty()) continue;
    double acc[kMetrics] = {};
    for (const auto& r : replicate) {
      const double vals[kMetrics] = {r.f1, r.precision, r.recall, r.shd.total(), r.shd.undirected,
                                     r.shd.reversed, r.shd.missing, r.shd.extra, r.runtime_s};
      for (std::size_t m = 0; m < kMetrics; ++m) acc[m] += vals[m];
    }
    for (std::size_t m = 0; m < kMetrics; ++m) means[m].push_back(acc[m] / static_cast<double>(replicate.size()));
  }
  MetricSummary s;
  s.replicates = means[0].size();
  s.f1 = mean_std(means[0]);
  s.precision = mean_std(means[1]);
  s.recall = mean_std(means[2]);
  s.shd = mean_std(means[3]);
  s.undirected = mean_std(means[4]);
  s.reversed = mean_std(means[5]);
  s.missing = mean_std(means[6]);
  s.extra = mean_std(means[7]);
  s.runtime_s = mean_std(means[8]);
  return s;
}

double Theorem1Ablation::get_pc_accuracy() const {
  return total_pc ? static_cast<double>(kept_pc) / static_cast<double>(total_pc) : 0.0;
}

double Theorem1Ablation::delete_nopc_accuracy() const {
  return total_nopc ? static_cast<double>(deleted_nopc) / static_cast<double>(total_nopc) : 0.0;
}

Theorem1Ablation ablation_theorem1(const Dag& truth, const std::function<bool(VarIndex, VarIndex)>& keep) {
  Theorem1Ablation out;
  const std::size_t n = truth.num_nodes();
  for (VarIndex z = 0; z < n; ++z) {
    for (VarIndex x = 0; x < n; ++x) {
      if (x == z) continue;
      const bool kept = keep(z, x);
      if (truth.adjacent(z, x)) {
        ++out.total_pc;
        if (kept) ++out.kept_pc;
      } else {
        ++out.total_nopc;
        if (!kept) ++out.deleted_nopc;
      }
    }
  }
  return out;
}

Theorem1Ablation ablation_theorem1(const Network& truth, const Dataset& data, const ScoreConfig& config) {
  if (data.num_variables() != truth.num_nodes()) throw Error("ablation_theorem1: data/network size mismatch");
  ScoreCache cache(data, config);
  return ablation_theorem1(truth.dag(), [&](VarIndex z, VarIndex x) { return theorem1_holds(cache, x, z).keep; });
}

std::optional<double> Theorem2Ablation::v_accuracy() const {
  if (total_v == 0) return std::nullopt;
  return static_cast<double>(correct_v) / static_cast<double>(total_v);
}

std::optional<double> Theorem2Ablation::nov_accuracy() const {
  if (total_nov == 0) return std::nullopt;
  return static_cast<double>(correct_nov) / static_cast<double>(total_nov);
}

Theorem2Ablation ablation_theorem2(const Dag& truth,
                                   const std::function<double(VarIndex, VarIndex, VarIndex)>& statistic) {
  Theorem2Ablation out;
  const std::size_t n = truth.num_nodes();
  for (VarIndex z = 0; z < n; ++z) {
    std::vector<VarIndex> nb;
    for (VarIndex v = 0; v < n; ++v)
      if (v != z && truth.adjacent(z, v)) nb.push_back(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        const VarIndex x = nb[i];
        const VarIndex y = nb[j];
        if (truth.adjacent(x, y)) continue;
        const bool collider = truth.has_edge(x, z) && truth.has_edge(y, z);
        const bool positive = statistic(x, z, y) > 0.0;
        if (collider) {
          ++out.total_v;
          if (positive) ++out.correct_v;
        } else {
          ++out.total_nov;
          if (!positive) ++out.correct_nov;
        }
      }
    }
  }
  return out;
}

Theorem2Ablation ablation_theorem2(const Network& truth, const Dataset& data, const ScoreConfig& config) {
  if (data.num_variables() != truth.num_nodes()) throw Error("ablation_theorem2: data/network size mismatch");
  ScoreCache cache(data, config);
  return ablation_theorem2(truth.dag(),
                           [&](VarIndex x, VarIndex z, VarIndex y) { return collider_statistic(cache, x, z, y); });
}

}  // namespace hlcd
