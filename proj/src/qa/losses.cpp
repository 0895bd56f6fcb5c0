#include <algorithm>
#include <cmath>

#include "cotah/kernels.hpp"
#include "cotah/qa.hpp"

namespace cotah::qa {
namespace {

double head_kl(const std::vector<double>& p, const std::vector<double>& q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    kl += p[i] * (std::log(p[i]) - std::log(std::max(q[i], kProbabilityFloor)));
  }
  // Rounding can leave tiny negatives for equal inputs.
  return std::max(kl, 0.0);
}

}  // namespace

AnswerDistribution to_distribution(const Logits& logits) {
  AnswerDistribution d{std::vector<double>(logits.start.size()),
                       std::vector<double>(logits.end.size())};
  kernels::softmax(logits.start, d.start);
  kernels::softmax(logits.end, d.end);
  return d;
}

double ce_loss(const AnswerDistribution& dist, const AnswerSpan& gold) {
  if (gold.start_pos >= dist.start.size() || gold.end_pos >= dist.end.size()) {
    throw ValidationError("ce_loss: gold position outside distribution");
  }
  const double ls = -std::log(std::max(dist.start[gold.start_pos], kProbabilityFloor));
  const double le = -std::log(std::max(dist.end[gold.end_pos], kProbabilityFloor));
  return 0.5 * (ls + le);
}

double consistency_loss(const AnswerDistribution& real, const AnswerDistribution& aug) {
  if (real.start.size() != aug.start.size() || real.end.size() != aug.end.size()) {
    throw ValidationError("consistency_loss: distributions of length " +
                          std::to_string(real.start.size()) + " and " +
                          std::to_string(aug.start.size()));
  }
  return 0.5 * (head_kl(real.start, aug.start) + head_kl(real.end, aug.end));
}

double total_loss(double l_ce, double l_cons, double lambda, int k, int tau) {
  if (k < tau || lambda == 0.0) return l_ce;
  return l_ce + lambda * l_cons;
}

AnswerSpan decode_span(const AnswerDistribution& dist, std::size_t max_answer_len) {
  const std::size_t sentinel = dist.sentinel();
  AnswerSpan best{sentinel, sentinel};
  double best_score = -1.0;
  // Valid pairs in (s, e) lexicographic order, the sentinel pair last; only
  // a strictly larger product replaces the incumbent.
  for (std::size_t s = 0; s < sentinel; ++s) {
    const std::size_t stop = std::min(sentinel, s + max_answer_len);
    const double start_p = dist.start[s];
    for (std::size_t e = s; e < stop; ++e) {
      const double score = start_p * dist.end[e];
      if (score > best_score) {
        best = {s, e};
        best_score = score;
      }
    }
  }
  if (dist.start[sentinel] * dist.end[sentinel] > best_score) best = {sentinel, sentinel};
  return best;
}

}  // namespace cotah::qa
