#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cotah {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files (JSON, JSONL, config text).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a documented contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Half-open character range [begin, end) into a document.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t pos) const { return pos >= begin && pos < end; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

}  // namespace cotah
