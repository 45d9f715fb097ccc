#include "hlcd/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace hlcd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_code(std::string_view text, std::int64_t& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

Dataset::Dataset(std::vector<std::string> names, std::vector<std::size_t> arities,
                 std::vector<std::vector<std::int32_t>> columns)
    : names_(std::move(names)), arities_(std::move(arities)), columns_(std::move(columns)) {
  if (names_.empty()) throw ValidationError("dataset has no variables");
  if (arities_.size() != names_.size() || columns_.size() != names_.size()) {
    throw ValidationError("dataset names, arities and columns disagree in length");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw ValidationError("duplicate variable name '" + n + "'");
  }
  num_rows_ = columns_.front().size();
  if (num_rows_ == 0) throw ValidationError("dataset has no rows");
  for (std::size_t v = 0; v < columns_.size(); ++v) {
    if (columns_[v].size() != num_rows_) throw ValidationError("ragged dataset columns");
    if (arities_[v] < 1) throw ValidationError("arity of '" + names_[v] + "' must be >= 1");
    for (const auto x : columns_[v]) {
      if (x < 0 || static_cast<std::size_t>(x) >= arities_[v]) {
        throw ValidationError("value out of range for '" + names_[v] + "': " + std::to_string(x));
      }
    }
  }
}

VarIndex Dataset::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error("unknown variable '" + std::string(name) + "'");
  return static_cast<VarIndex>(it - names_.begin());
}

bool Dataset::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Dataset load_dataset(std::istream& in, const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> override_arities;
  bool have_override = false;

  // Leading "#arities:" line and blank lines, then the header.
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      constexpr std::string_view kTag = "#arities:";
      if (view.substr(0, kTag.size()) == kTag) {
        for (auto field : split_fields(view.substr(kTag.size()))) {
          std::int64_t r = 0;
          if (!parse_code(field, r) || r < 1) {
            throw ParseError("line " + std::to_string(line_no) + ": bad arity '" + std::string(field) + "'");
          }
          override_arities.push_back(static_cast<std::size_t>(r));
        }
        have_override = true;
      }
      continue;
    }
    for (auto field : split_fields(view)) {
      if (field.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty column name");
      names.emplace_back(field);
    }
    break;
  }
  if (names.empty()) throw ParseError("missing header");
  {
    std::unordered_set<std::string> seen;
    for (const auto& n : names) {
      if (!seen.insert(n).second) throw ParseError("duplicate column name '" + n + "'");
    }
  }
  if (have_override && override_arities.size() != names.size()) {
    throw ParseError("#arities line has " + std::to_string(override_arities.size()) + " entries for " +
                     std::to_string(names.size()) + " columns");
  }

  const std::size_t n = names.size();
  std::vector<std::vector<std::string>> raw(n);
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != n) {
      throw ParseError("line " + std::to_string(line_no) + ": ragged row (" + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(n) + ")");
    }
    for (std::size_t v = 0; v < n; ++v) raw[v].emplace_back(fields[v]);
  }
  if (raw.front().empty()) throw ParseError("empty body");

  std::vector<std::vector<std::int32_t>> columns(n);
  std::vector<std::size_t> arities(n, 1);
  for (std::size_t v = 0; v < n; ++v) {
    auto& col = columns[v];
    col.reserve(raw[v].size());
    bool labels = false;
    for (const auto& cell : raw[v]) {
      std::int64_t code = 0;
      if (!parse_code(cell, code) || code < 0 || code > INT32_MAX) {
        if (!options.map_string_categories) {
          throw ParseError("column '" + names[v] + "': non-integer cell '" + cell + "'");
        }
        labels = true;
        break;
      }
      col.push_back(static_cast<std::int32_t>(code));
    }
    if (labels) {
      col.clear();
      std::unordered_map<std::string, std::int32_t> codes;
      for (const auto& cell : raw[v]) {
        auto [it, inserted] = codes.emplace(cell, static_cast<std::int32_t>(codes.size()));
        col.push_back(it->second);
      }
    }
    const std::int32_t max_code = *std::max_element(col.begin(), col.end());
    arities[v] = static_cast<std::size_t>(max_code) + 1;
    if (have_override) {
      if (arities[v] > override_arities[v]) {
        throw ParseError("column '" + names[v] + "': value out of range (" + std::to_string(max_code) +
                         " with arity " + std::to_string(override_arities[v]) + ")");
      }
      arities[v] = override_arities[v];
    }
  }
  return Dataset(std::move(names), std::move(arities), std::move(columns));
}

Dataset load_dataset_file(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return load_dataset(in, options);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  const std::size_t n = data.num_variables();
  out << "#arities: ";
  for (std::size_t v = 0; v < n; ++v) out << (v ? "," : "") << data.arity(v);
  out << '\n';
  for (std::size_t v = 0; v < n; ++v) out << (v ? "," : "") << data.name(v);
  out << '\n';
  std::string row;
  char buf[16];
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    row.clear();
    for (std::size_t v = 0; v < n; ++v) {
      if (v) row.push_back(',');
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, data.value(i, v));
      row.append(buf, ptr);
    }
    row.push_back('\n');
    out << row;
  }
}

void write_dataset_file(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  write_dataset(out, data);
}

std::int64_t ContingencyTable::total() const {
  return std::accumulate(config_totals.begin(), config_totals.end(), std::int64_t{0});
}

ContingencyTable count(const Dataset& data, VarIndex child, std::span<const VarIndex> parents) {
  const std::size_t n = data.num_variables();
  if (child >= n) throw Error("count: child index out of range");
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parents[i] >= n) throw Error("count: parent index out of range");
    if (parents[i] == child) throw Error("count: child appears in parents");
    for (std::size_t k = 0; k < i; ++k) {
      if (parents[k] == parents[i]) throw Error("count: repeated parent");
    }
  }

  ContingencyTable t;
  t.child = child;
  t.parents.assign(parents.begin(), parents.end());
  t.child_arity = data.arity(child);
  std::vector<std::size_t> strides(parents.size());
  std::size_t q = 1;
  for (std::size_t i = parents.size(); i-- > 0;) {
    strides[i] = q;
    const std::size_t r = data.arity(parents[i]);
    if (q > kMaxTableCells / r) throw Error("count: parent configuration space too large");
    q *= r;
  }
  if (q > kMaxTableCells / t.child_arity) throw Error("count: contingency table too large");
  t.num_configs = q;
  t.counts.assign(q * t.child_arity, 0);
  t.config_totals.assign(q, 0);

  const std::size_t rows = data.num_rows();
  const auto child_col = data.column(child);
  std::vector<std::size_t> config(rows, 0);
  for (std::size_t i = 0; i < parents.size(); ++i) {
    const auto col = data.column(parents[i]);
    const std::size_t s = strides[i];
    for (std::size_t row = 0; row < rows; ++row) config[row] += static_cast<std::size_t>(col[row]) * s;
  }
  for (std::size_t row = 0; row < rows; ++row) {
    ++t.counts[config[row] * t.child_arity + static_cast<std::size_t>(child_col[row])];
    ++t.config_totals[config[row]];
  }
  return t;
}

std::vector<std::int64_t> marginal_counts(const Dataset& data, VarIndex variable) {
  if (variable >= data.num_variables()) throw Error("marginal_counts: index out of range");
  std::vector<std::int64_t> counts(data.arity(variable), 0);
  for (const auto x : data.column(variable)) ++counts[static_cast<std::size_t>(x)];
  return counts;
}

}  // namespace hlcd
