// errors.hpp -- exception hierarchy shared by all satlang modules.
//
// Conventions:
//   * ArgumentError  -- caller violated a precondition (bad flag value, length
//                       mismatch, k < 1, ...).
//   * CapacityError  -- an operation would exceed a configured desk-scale cap
//                       (enumeration width, trie depth, witness variable cap).
//   * ParseError     -- malformed textual or binary input; carries a position.
//   * TrainingError  -- optimization diverged (NaN loss); carries the last
//                       stable checkpoint upstream via the training API.
//   * IoError        -- file-system failure with path context.
//
// The CLI maps ArgumentError/usage problems to exit code 2 and everything
// else to exit code 1.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace satlang {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
 public:
  IoError(const std::string& what, const std::string& path)
      : Error(what + ": " + path) {}
};

}  // namespace satlang
