#pragma once
// QuAC-style scoring: word-overlap F1 against reference answers, the
// human-equivalence ratios HEQ-Q / HEQ-D, and per-turn aggregation.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cotah/common.hpp"
#include "json.hpp"

namespace cotah::eval {

// Lowercase, strip ASCII punctuation, drop the articles a/an/the and
// collapse whitespace.
std::string normalize_text(std::string_view s);
std::vector<std::string> normalized_tokens(std::string_view s);

// Best bag-of-tokens F1 of `prediction` over `references` (non-empty).
double token_f1(std::string_view prediction,
                std::span<const std::string> references);

// Leave-one-out agreement among references; 1.0 with fewer than two.
double human_f1(std::span<const std::string> references);

struct TurnResult {
  std::string dialog_id;
  int k = 0;
  double model_f1 = 0.0;
  double human_f1 = 0.0;
};

struct HeqScores {
  double heq_q = 0.0;
  double heq_d = 0.0;
};

// A turn counts when model_f1 >= human_f1; a dialog when all its turns do.
HeqScores heq(std::span<const TurnResult> results);

struct TurnBucket {
  int k = 0;
  double mean_f1 = 0.0;
  std::size_t count = 0;
  friend bool operator==(const TurnBucket&, const TurnBucket&) = default;
};

std::vector<TurnBucket> per_turn_f1(std::span<const TurnResult> results);

// Aggregate scores.  f1, heq_q, heq_d and per-turn means are percentages;
// split_digest identifies the evaluated dialog set.
struct Report {
  double f1 = 0.0;
  double heq_q = 0.0;
  double heq_d = 0.0;
  std::size_t questions = 0;
  std::size_t dialogs = 0;
  std::string split_digest;
  std::vector<TurnBucket> per_turn;
};

Report build_report(std::span<const TurnResult> results,
                    std::string split_digest);
nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);
std::string per_turn_csv(const Report& report);

struct TurnDelta {
  int k = 0;
  double delta_f1 = 0.0;  // b - a; turns missing on one side are skipped
};

struct ReportDelta {
  double f1 = 0.0;
  double heq_q = 0.0;
  double heq_d = 0.0;
  std::vector<TurnDelta> per_turn;
};

// Differences b - a.  Throws ValidationError when the reports were scored
// on different splits.
ReportDelta compare_runs(const Report& a, const Report& b);
nlohmann::json to_json(const ReportDelta& delta);
std::string format_delta_table(const ReportDelta& delta);

}  // namespace cotah::eval
