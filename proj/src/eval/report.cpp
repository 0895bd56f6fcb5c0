#include <cstdio>
#include <map>
#include <sstream>

#include "cotah/common.hpp"
#include "cotah/eval.hpp"

namespace cotah::eval {

HeqScores heq(std::span<const TurnResult> results) {
  if (results.empty()) throw ValidationError("heq: no turn results");
  std::size_t good_turns = 0;
  std::map<std::string_view, bool> dialog_ok;
  for (const auto& r : results) {
    const bool ok = r.model_f1 >= r.human_f1;
    good_turns += ok ? 1 : 0;
    auto [it, inserted] = dialog_ok.try_emplace(r.dialog_id, ok);
    if (!inserted) it->second = it->second && ok;
  }
  std::size_t good_dialogs = 0;
  for (const auto& [id, ok] : dialog_ok) good_dialogs += ok ? 1 : 0;
  return {static_cast<double>(good_turns) / results.size(),
          static_cast<double>(good_dialogs) / dialog_ok.size()};
}

std::vector<TurnBucket> per_turn_f1(std::span<const TurnResult> results) {
  std::map<int, std::pair<double, std::size_t>> groups;
  for (const auto& r : results) {
    auto& [sum, n] = groups[r.k];
    sum += r.model_f1;
    ++n;
  }
  std::vector<TurnBucket> out;
  out.reserve(groups.size());
  for (const auto& [k, acc] : groups) {
    out.push_back({k, acc.first / static_cast<double>(acc.second), acc.second});
  }
  return out;
}

Report build_report(std::span<const TurnResult> results,
                    std::string split_digest) {
  if (results.empty()) throw ValidationError("build_report: no turn results");
  Report report;
  double f1_sum = 0.0;
  std::map<std::string_view, int> dialogs;
  for (const auto& r : results) {
    f1_sum += r.model_f1;
    ++dialogs[r.dialog_id];
  }
  const HeqScores h = heq(results);
  report.f1 = 100.0 * f1_sum / results.size();
  report.heq_q = 100.0 * h.heq_q;
  report.heq_d = 100.0 * h.heq_d;
  report.questions = results.size();
  report.dialogs = dialogs.size();
  report.split_digest = std::move(split_digest);
  report.per_turn = per_turn_f1(results);
  for (auto& b : report.per_turn) b.mean_f1 *= 100.0;
  return report;
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json per_turn = nlohmann::json::array();
  for (const auto& b : report.per_turn) {
    per_turn.push_back({{"k", b.k}, {"f1", b.mean_f1}, {"count", b.count}});
  }
  return {{"f1", report.f1},
          {"heq_q", report.heq_q},
          {"heq_d", report.heq_d},
          {"questions", report.questions},
          {"dialogs", report.dialogs},
          {"split_digest", report.split_digest},
          {"per_turn", per_turn}};
}

Report report_from_json(const nlohmann::json& j) {
  try {
    Report r;
    r.f1 = j.at("f1").get<double>();
    r.heq_q = j.at("heq_q").get<double>();
    r.heq_d = j.at("heq_d").get<double>();
    r.questions = j.value("questions", std::size_t{0});
    r.dialogs = j.value("dialogs", std::size_t{0});
    r.split_digest = j.at("split_digest").get<std::string>();
    for (const auto& b : j.at("per_turn")) {
      r.per_turn.push_back({b.at("k").get<int>(), b.at("f1").get<double>(),
                            b.at("count").get<std::size_t>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
}

std::string per_turn_csv(const Report& report) {
  std::ostringstream out;
  out << "k,f1,count\n";
  for (const auto& b : report.per_turn) {
    char line[96];
    std::snprintf(line, sizeof line, "%d,%.6f,%zu\n", b.k, b.mean_f1, b.count);
    out << line;
  }
  return out.str();
}

ReportDelta compare_runs(const Report& a, const Report& b) {
  if (a.split_digest != b.split_digest) {
    throw ValidationError("compare: reports were scored on different splits (" +
                          a.split_digest + " vs " + b.split_digest + ")");
  }
  ReportDelta d{b.f1 - a.f1, b.heq_q - a.heq_q, b.heq_d - a.heq_d, {}};
  std::map<int, double> base;
  for (const auto& t : a.per_turn) base[t.k] = t.mean_f1;
  for (const auto& t : b.per_turn) {
    if (auto it = base.find(t.k); it != base.end()) {
      d.per_turn.push_back({t.k, t.mean_f1 - it->second});
    }
  }
  return d;
}

nlohmann::json to_json(const ReportDelta& delta) {
  nlohmann::json per_turn = nlohmann::json::array();
  for (const auto& t : delta.per_turn) per_turn.push_back({{"k", t.k}, {"delta_f1", t.delta_f1}});
  return {{"delta_f1", delta.f1},
          {"delta_heq_q", delta.heq_q},
          {"delta_heq_d", delta.heq_d},
          {"per_turn", per_turn}};
}

std::string format_delta_table(const ReportDelta& delta) {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof line, "%-8s %+8.2f\n%-8s %+8.2f\n%-8s %+8.2f\n",
                "F1", delta.f1, "HEQ-Q", delta.heq_q, "HEQ-D", delta.heq_d);
  out << line << "turn  delta_f1\n";
  for (const auto& t : delta.per_turn) {
    std::snprintf(line, sizeof line, "%4d  %+8.2f\n", t.k, t.delta_f1);
    out << line;
  }
  return out.str();
}

}  // namespace cotah::eval
