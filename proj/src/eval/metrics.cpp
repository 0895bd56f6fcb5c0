#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "cotah/eval.hpp"

namespace cotah::eval {

std::string normalize_text(std::string_view s) {
  std::string lowered;
  lowered.reserve(s.size());
  for (unsigned char c : s) {
    if (std::ispunct(c)) continue;
    lowered.push_back(static_cast<char>(std::tolower(c)));
  }
  std::istringstream words(lowered);
  std::string out;
  std::string word;
  while (words >> word) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

std::vector<std::string> normalized_tokens(std::string_view s) {
  std::istringstream words(normalize_text(s));
  std::vector<std::string> tokens;
  std::string word;
  while (words >> word) tokens.push_back(std::move(word));
  return tokens;
}

namespace {

double pair_f1(const std::vector<std::string>& pred,
               const std::vector<std::string>& ref) {
  if (pred.empty() || ref.empty()) return pred.empty() && ref.empty() ? 1.0 : 0.0;
  std::map<std::string_view, int> counts;
  for (const auto& t : ref) ++counts[t];
  int common = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / pred.size();
  const double recall = static_cast<double>(common) / ref.size();
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double token_f1(std::string_view prediction,
                std::span<const std::string> references) {
  const auto pred = normalized_tokens(prediction);
  double best = 0.0;
  for (const auto& r : references) best = std::max(best, pair_f1(pred, normalized_tokens(r)));
  return best;
}

double human_f1(std::span<const std::string> references) {
  if (references.size() < 2) return 1.0;
  double total = 0.0;
  std::vector<std::string> others;
  for (std::size_t i = 0; i < references.size(); ++i) {
    others.clear();
    for (std::size_t j = 0; j < references.size(); ++j) {
      if (j != i) others.push_back(references[j]);
    }
    total += token_f1(references[i], others);
  }
  return total / static_cast<double>(references.size());
}

}  // namespace cotah::eval
