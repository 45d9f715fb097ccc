#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlcd {

/// Column index of a variable in a Dataset or node index in a Network.
using VarIndex = std::size_t;

/// Sorted, duplicate-free list of variable indices.
using VarSet = std::vector<VarIndex>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV, JSON, BIF).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace hlcd
