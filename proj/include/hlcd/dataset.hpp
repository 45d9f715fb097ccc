#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hlcd/common.hpp"

namespace hlcd {

/// Immutable table of integer-coded categorical samples, stored column-major.
///
/// Every cell of column i lies in [0, arity(i)). Arity may exceed the largest
/// observed code so that a sample missing a rare state still scores against
/// the model's true state space.
class Dataset {
 public:
  /// Validates shape and ranges; throws ValidationError on any violation.
  Dataset(std::vector<std::string> names, std::vector<std::size_t> arities,
          std::vector<std::vector<std::int32_t>> columns);

  std::size_t num_variables() const { return names_.size(); }
  std::size_t num_rows() const { return num_rows_; }

  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(VarIndex v) const { return names_.at(v); }
  const std::vector<std::size_t>& arities() const { return arities_; }
  std::size_t arity(VarIndex v) const { return arities_.at(v); }

  std::span<const std::int32_t> column(VarIndex v) const { return columns_.at(v); }
  std::int32_t value(std::size_t row, VarIndex v) const { return columns_[v][row]; }

  /// Throws Error if no variable has this name.
  VarIndex index_of(std::string_view name) const;
  bool contains(std::string_view name) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> arities_;
  std::vector<std::vector<std::int32_t>> columns_;
  std::size_t num_rows_ = 0;
};

struct CsvOptions {
  /// When false, any non-integer cell is an error. When true, a column that
  /// contains a non-integer cell is treated as labels and coded in order of
  /// first appearance.
  bool map_string_categories = false;
};

/// Reads comma-separated data: an optional "#arities: r1,r2,..." line, a
/// header of unique names, then one row of codes per sample. LF or CRLF.
Dataset load_dataset(std::istream& in, const CsvOptions& options = {});
Dataset load_dataset_file(const std::string& path, const CsvOptions& options = {});

/// Writes the "#arities:" line, the header and all rows. load_dataset reads
/// the output back into an identical Dataset.
void write_dataset(std::ostream& out, const Dataset& data);
void write_dataset_file(const std::string& path, const Dataset& data);

/// Counts N_jk of a child against an ordered parent list.
///
/// Parent configuration j is the mixed-radix code of the parent values with
/// the first parent most significant and the last parent varying fastest.
struct ContingencyTable {
  VarIndex child = 0;
  std::vector<VarIndex> parents;
  std::size_t child_arity = 0;
  std::size_t num_configs = 1;          // q
  std::vector<std::int64_t> counts;     // q * r, row-major by config
  std::vector<std::int64_t> config_totals;  // N_j

  std::int64_t at(std::size_t config, std::size_t state) const {
    return counts[config * child_arity + state];
  }
  std::int64_t total() const;
};

/// Largest q * r a dense ContingencyTable may have.
inline constexpr std::size_t kMaxTableCells = std::size_t{1} << 28;

/// Throws Error if child appears in parents, an index is out of range,
/// parents repeat, or the table would exceed kMaxTableCells.
ContingencyTable count(const Dataset& data, VarIndex child, std::span<const VarIndex> parents);

std::vector<std::int64_t> marginal_counts(const Dataset& data, VarIndex variable);

}  // namespace hlcd
