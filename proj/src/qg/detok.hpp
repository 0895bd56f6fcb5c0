#pragma once

#include <span>
#include <string>

namespace cotah::qg::detail {

// Joins word tokens with spaces, attaching closing punctuation to the left.
inline std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    const bool closing = t.size() == 1 && std::string_view(".,?!;:)'%").find(t[0]) != std::string_view::npos;
    if (!out.empty() && !closing && out.back() != '(') out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace cotah::qg::detail
