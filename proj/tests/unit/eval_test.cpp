#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "cotah/eval.hpp"
#include "cotah/util.hpp"
#include "doctest.h"

using namespace cotah;
using eval::TurnResult;

namespace {

// Independent F1 on already-normalized whitespace-separated strings.
double oracle_f1(const std::string& pred, const std::string& ref) {
  auto bag = [](const std::string& s) {
    std::map<std::string, int> m;
    std::istringstream in(s);
    for (std::string w; in >> w;) ++m[w];
    return m;
  };
  const auto p = bag(pred);
  const auto r = bag(ref);
  int np = 0, nr = 0, common = 0;
  for (const auto& [w, c] : p) np += c;
  for (const auto& [w, c] : r) nr += c;
  if (np == 0 || nr == 0) return np == nr ? 1.0 : 0.0;
  for (const auto& [w, c] : p) {
    if (auto it = r.find(w); it != r.end()) common += std::min(c, it->second);
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / np;
  const double recall = static_cast<double>(common) / nr;
  return 2 * precision * recall / (precision + recall);
}

std::vector<std::string> refs(std::initializer_list<const char*> xs) {
  return {xs.begin(), xs.end()};
}

std::string random_phrase(util::Rng& rng) {
  static const std::vector<std::string> words = {"red", "car", "The", "a",  "in",
                                                 "1963", "blue", "an", "Car", "went"};
  std::string out;
  const auto n = rng.below(6);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!out.empty()) out += rng.below(3) == 0 ? "  " : " ";
    out += words[rng.below(words.size())];
    if (rng.below(5) == 0) out += ",";
  }
  return out;
}

}  // namespace

TEST_CASE("normalize_text") {
  CHECK(eval::normalize_text("The Red Car!") == "red car");
  CHECK(eval::normalize_text("") == "");
  CHECK(eval::normalize_text("a  a  a") == "");
  CHECK(eval::normalize_text("  An apple,  THE pear ") == "apple pear");
  CHECK(eval::normalize_text("theatre") == "theatre");
}

TEST_CASE("token_f1 examples") {
  CHECK(eval::token_f1("red car", refs({"red car"})) == 1.0);
  const double expected = oracle_f1("red car", "red car in 1963");
  CHECK(expected == doctest::Approx(2.0 / 3.0));
  CHECK(eval::token_f1("red car", refs({"red car in 1963"})) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(eval::token_f1("blue truck", refs({"red car"})) == 0.0);
  CHECK(eval::token_f1("the", refs({"a"})) == 1.0);
  CHECK(eval::token_f1("the", refs({"car"})) == 0.0);
  CHECK(eval::token_f1("car", refs({"boat", "red car"})) ==
        doctest::Approx(oracle_f1("car", "red car")));
}

TEST_CASE("token_f1 matches the oracle on random phrases") {
  util::Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_phrase(rng);
    const auto b = random_phrase(rng);
    const double got = eval::token_f1(a, std::vector<std::string>{b});
    CAPTURE(a);
    CAPTURE(b);
    CHECK(got == doctest::Approx(oracle_f1(eval::normalize_text(a), eval::normalize_text(b))));
    // symmetry for a single reference
    CHECK(got == eval::token_f1(b, std::vector<std::string>{a}));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("token_f1 ignores case and articles") {
  util::Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_phrase(rng);
    const auto b = random_phrase(rng);
    std::string upper = a;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    const double base = eval::token_f1(a, std::vector<std::string>{b});
    CHECK(eval::token_f1(upper, std::vector<std::string>{b}) == base);
    CHECK(eval::token_f1("the " + a + " an", std::vector<std::string>{"A " + b}) == base);
  }
}

TEST_CASE("human_f1 is leave-one-out") {
  CHECK(eval::human_f1(refs({"red car", "red car"})) == 1.0);
  const double expected = (oracle_f1("red car", "red car in 1963") +
                           oracle_f1("red car in 1963", "red car")) / 2.0;
  CHECK(eval::human_f1(refs({"red car", "red car in 1963"})) == doctest::Approx(expected));
  CHECK(eval::human_f1(refs({"red car", "red car in 1963"})) == doctest::Approx(2.0 / 3.0));
  CHECK(eval::human_f1(refs({"anything"})) == 1.0);
  // Three references: each is scored against the best of the other two.
  const double three = eval::human_f1(refs({"red car", "car", "blue boat"}));
  CHECK(three == doctest::Approx((oracle_f1("red car", "car") + oracle_f1("car", "red car") + 0.0) /
                                 3.0));
  CHECK(three == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("heq hand-computed three-turn fixture") {
  const std::vector<TurnResult> r = {
      {"d", 0, 0.8, 0.7}, {"d", 1, 0.5, 0.9}, {"d", 2, 1.0, 1.0}};
  const auto h = eval::heq(r);
  CHECK(h.heq_q == doctest::Approx(2.0 / 3.0));
  CHECK(h.heq_d == 0.0);

  std::vector<TurnResult> all = {{"a", 0, 1.0, 1.0}, {"a", 1, 1.0, 0.4}, {"b", 0, 1.0, 0.9}};
  const auto perfect = eval::heq(all);
  CHECK(perfect.heq_q == 1.0);
  CHECK(perfect.heq_d == 1.0);
  CHECK_THROWS(eval::heq({}));
}

TEST_CASE("heq_d never exceeds heq_q when dialogs have equal length") {
  // Each passing dialog contributes all n of its turns to heq_q.
  util::Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<TurnResult> r;
    const auto dialogs = 1 + rng.below(6);
    const auto turns = 1 + rng.below(5);
    for (std::uint64_t d = 0; d < dialogs; ++d) {
      for (std::uint64_t k = 0; k < turns; ++k) {
        r.push_back({"d" + std::to_string(d), static_cast<int>(k),
                     static_cast<double>(rng.below(5)) / 4.0,
                     static_cast<double>(rng.below(5)) / 4.0});
      }
    }
    const auto h = eval::heq(r);
    CHECK(h.heq_d <= h.heq_q);
  }
}

TEST_CASE("heq_d can exceed heq_q when a short dialog passes and a long one fails") {
  const std::vector<TurnResult> r = {{"short", 0, 1.0, 0.5},
                                     {"long", 0, 0.0, 0.5},
                                     {"long", 1, 0.0, 0.5},
                                     {"long", 2, 0.0, 0.5},
                                     {"long", 3, 0.0, 0.5}};
  const auto h = eval::heq(r);
  CHECK(h.heq_q == doctest::Approx(0.2));
  CHECK(h.heq_d == doctest::Approx(0.5));
}

TEST_CASE("per_turn_f1 groups by turn index") {
  const std::vector<TurnResult> r = {{"a", 0, 1.0, 1}, {"b", 0, 0.0, 1}, {"a", 1, 0.25, 1}};
  const auto buckets = eval::per_turn_f1(r);
  REQUIRE(buckets.size() == 2);
  CHECK(buckets[0] == eval::TurnBucket{0, 0.5, 2});
  CHECK(buckets[1] == eval::TurnBucket{1, 0.25, 1});
  CHECK(eval::per_turn_f1({}).empty());

  const std::vector<TurnResult> single = {{"a", 2, 0.3, 1}, {"a", 0, 0.9, 1}, {"a", 1, 0.1, 1}};
  const auto one = eval::per_turn_f1(single);
  REQUIRE(one.size() == 3);
  CHECK(one[0].mean_f1 == 0.9);
  CHECK(one[1].mean_f1 == 0.1);
  CHECK(one[2].mean_f1 == 0.3);
}

TEST_CASE("report round trip, CSV and comparison") {
  const std::vector<TurnResult> r = {
      {"d", 0, 0.8, 0.7}, {"d", 1, 0.5, 0.9}, {"d", 2, 1.0, 1.0}};
  const auto report = eval::build_report(r, "abc-1");
  CHECK(report.f1 == doctest::Approx(100.0 * 2.3 / 3.0));
  CHECK(report.heq_q == doctest::Approx(100.0 * 2.0 / 3.0));
  CHECK(report.heq_d == 0.0);
  CHECK(report.questions == 3);
  CHECK(report.dialogs == 1);

  const auto back = eval::report_from_json(eval::to_json(report));
  CHECK(back.f1 == report.f1);
  CHECK(back.per_turn == report.per_turn);
  CHECK(back.split_digest == "abc-1");

  const std::string csv = eval::per_turn_csv(report);
  CHECK(csv.rfind("k,f1,count\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  const auto same = eval::compare_runs(report, report);
  CHECK(same.f1 == 0.0);
  CHECK(same.heq_q == 0.0);
  CHECK(same.heq_d == 0.0);
  for (const auto& t : same.per_turn) CHECK(t.delta_f1 == 0.0);

  auto better = report;
  better.f1 += 1.8;
  better.per_turn[1].mean_f1 += 10.0;
  const auto delta = eval::compare_runs(report, better);
  CHECK(delta.f1 == doctest::Approx(1.8));
  CHECK(delta.per_turn[1].delta_f1 == doctest::Approx(10.0));
  CHECK(eval::format_delta_table(delta).find("F1") != std::string::npos);

  auto other = report;
  other.split_digest = "xyz-1";
  CHECK_THROWS_AS(eval::compare_runs(report, other), ValidationError);
}
