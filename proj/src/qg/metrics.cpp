#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "cotah/qg.hpp"

namespace cotah::qg {
namespace {

constexpr double kSmoothingEpsilon = 0.1;

// Punctuation split off words, case kept (close to the 13a tokenizer).
std::vector<std::string> bleu_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isspace(u)) {
      flush();
    } else if (std::ispunct(u)) {
      flush();
      out.emplace_back(1, c);
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

// Lowercased alphanumeric runs.
std::vector<std::string> rouge_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

using Ngram = std::vector<std::string>;

std::map<Ngram, int> ngram_counts(const std::vector<std::string>& toks, std::size_t n) {
  std::map<Ngram, int> counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    ++counts[Ngram(toks.begin() + static_cast<std::ptrdiff_t>(i),
                   toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

double corpus_bleu(const std::vector<std::vector<std::string>>& refs,
                   const std::vector<std::vector<std::string>>& hyps, std::size_t max_n) {
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  std::vector<double> matches(max_n + 1, 0.0);
  std::vector<double> totals(max_n + 1, 0.0);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    hyp_len += hyps[i].size();
    ref_len += refs[i].size();
    for (std::size_t n = 1; n <= max_n; ++n) {
      const auto h = ngram_counts(hyps[i], n);
      const auto r = ngram_counts(refs[i], n);
      for (const auto& [gram, count] : h) {
        auto it = r.find(gram);
        if (it != r.end()) matches[n] += std::min(count, it->second);
        totals[n] += count;
      }
    }
  }
  if (hyp_len == 0 || matches[1] == 0.0) return 0.0;
  double log_precision = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const double m = matches[n] > 0.0 ? matches[n] : kSmoothingEpsilon;
    log_precision += std::log(m / std::max(totals[n], 1.0));
  }
  log_precision /= static_cast<double>(max_n);
  const double brevity = hyp_len >= ref_len
                             ? 1.0
                             : std::exp(1.0 - static_cast<double>(ref_len) / hyp_len);
  return 100.0 * brevity * std::exp(log_precision);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

QgScores qg_metrics(std::span<const std::string> references,
                    std::span<const std::string> hypotheses) {
  if (references.size() != hypotheses.size()) {
    throw ValidationError("qg_metrics: " + std::to_string(references.size()) +
                          " references vs " + std::to_string(hypotheses.size()) +
                          " hypotheses");
  }
  if (references.empty()) throw ValidationError("qg_metrics: empty input");

  std::vector<std::vector<std::string>> refs;
  std::vector<std::vector<std::string>> hyps;
  double rouge_sum = 0.0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    refs.push_back(bleu_tokens(references[i]));
    hyps.push_back(bleu_tokens(hypotheses[i]));
    const auto r = rouge_tokens(references[i]);
    const auto h = rouge_tokens(hypotheses[i]);
    const std::size_t lcs = r.empty() || h.empty() ? 0 : lcs_length(r, h);
    if (lcs > 0) {
      const double p = static_cast<double>(lcs) / h.size();
      const double rc = static_cast<double>(lcs) / r.size();
      rouge_sum += 2.0 * p * rc / (p + rc);
    }
  }
  return {corpus_bleu(refs, hyps, 1), corpus_bleu(refs, hyps, 4),
          100.0 * rouge_sum / static_cast<double>(references.size())};
}

}  // namespace cotah::qg
