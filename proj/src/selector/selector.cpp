#include <algorithm>
#include <cmath>
#include <numeric>

#include "cotah/kernels.hpp"
#include "cotah/selector.hpp"

namespace cotah::selector {

double cosine_sim(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine_sim: dimension mismatch " + std::to_string(u.size()) +
                          " vs " + std::to_string(v.size()));
  }
  const double uu = kernels::sum_squares(u);
  const double vv = kernels::sum_squares(v);
  if (uu == 0.0 || vv == 0.0) throw ValidationError("cosine_sim: zero vector");
  const double c = kernels::dot(u, v) / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(c, -1.0, 1.0);
}

double score_synthetic(const qg::SyntheticQuestion& q_syn, std::string_view q_j,
                       std::string_view q_j1, const SentenceEncoder& encoder) {
  const Embedding s = encoder.encode(q_syn.text);
  return cosine_sim(encoder.encode(q_j), s) + cosine_sim(encoder.encode(q_j1), s);
}

qg::QuestionPool score_pool(qg::QuestionPool pool, std::string_view current_question,
                            const SentenceEncoder& encoder) {
  const int k = static_cast<int>(pool.real.size());
  for (auto& q : pool.synthetic) {
    if (q.slot < 0 || q.slot >= k) {
      throw ValidationError("score_pool: synthetic slot " + std::to_string(q.slot) +
                            " outside pool of turn " + std::to_string(k));
    }
    const std::string_view right =
        q.slot + 1 < k ? std::string_view(pool.real[q.slot + 1]) : current_question;
    q.score = score_synthetic(q, pool.real[q.slot], right, encoder);
  }
  return pool;
}

qg::QuestionPool filter_similar(qg::QuestionPool pool, std::string_view current_question,
                                double gamma, const SentenceEncoder& encoder) {
  if (pool.synthetic.empty()) return pool;
  std::vector<Embedding> anchors;
  anchors.push_back(encoder.encode(current_question));
  for (const auto& q : pool.real) anchors.push_back(encoder.encode(q));
  std::vector<qg::SyntheticQuestion> kept;
  for (auto& q : pool.synthetic) {
    const Embedding e = encoder.encode(q.text);
    double highest = -1.0;
    for (const auto& a : anchors) highest = std::max(highest, cosine_sim(a, e));
    if (!(highest > gamma)) kept.push_back(std::move(q));
  }
  pool.synthetic = std::move(kept);
  return pool;
}

qg::QuestionPool top_m(qg::QuestionPool pool, std::size_t m) {
  for (const auto& q : pool.synthetic) {
    if (!q.score) throw ValidationError("top_m: unscored synthetic question '" + q.text + "'");
  }
  std::stable_sort(pool.synthetic.begin(), pool.synthetic.end(),
                   [](const qg::SyntheticQuestion& a, const qg::SyntheticQuestion& b) {
                     if (*a.score != *b.score) return *a.score > *b.score;
                     if (a.slot != b.slot) return a.slot < b.slot;
                     return a.order < b.order;
                   });
  if (pool.synthetic.size() > m) pool.synthetic.resize(m);
  return pool;
}

Distribution parse_distribution(std::string_view name) {
  if (name == "uniform") return Distribution::uniform;
  if (name == "linear") return Distribution::linear;
  throw ValidationError("unknown selection distribution '" + std::string(name) + "'");
}

std::string_view distribution_name(Distribution d) {
  return d == Distribution::uniform ? "uniform" : "linear";
}

std::vector<qg::SyntheticQuestion> sample_selection(const qg::QuestionPool& pool, int k,
                                                    const SelectionConfig& config,
                                                    util::Rng& rng) {
  if (config.S == 0) return {};
  if (pool.synthetic.size() <= config.S) return pool.synthetic;

  std::vector<std::size_t> remaining(pool.synthetic.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<double> weights;
  for (const auto& q : pool.synthetic) {
    weights.push_back(config.distribution == Distribution::uniform
                          ? 1.0
                          : static_cast<double>(k - q.slot));
  }

  std::vector<qg::SyntheticQuestion> picked;
  for (std::size_t draw = 0; draw < config.S; ++draw) {
    double total = 0.0;
    for (std::size_t idx : remaining) total += weights[idx];
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t chosen = remaining.size() - 1;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      acc += weights[remaining[r]];
      if (u < acc) {
        chosen = r;
        break;
      }
    }
    picked.push_back(pool.synthetic[remaining[chosen]]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return picked;
}

std::vector<std::string> AugmentedHistory::questions() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.text);
  return out;
}

AugmentedHistory assemble_augmented_history(std::span<const std::string> real_history,
                                            std::span<const qg::SyntheticQuestion> selected) {
  std::vector<const qg::SyntheticQuestion*> ordered;
  for (const auto& q : selected) ordered.push_back(&q);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const qg::SyntheticQuestion* a, const qg::SyntheticQuestion* b) {
                     if (a->slot != b->slot) return a->slot < b->slot;
                     const double sa = a->score.value_or(0.0);
                     const double sb = b->score.value_or(0.0);
                     if (sa != sb) return sa > sb;
                     return a->order < b->order;
                   });
  AugmentedHistory h;
  std::size_t next = 0;
  for (std::size_t j = 0; j < real_history.size(); ++j) {
    h.entries.push_back({real_history[j], Origin::real, static_cast<int>(j)});
    while (next < ordered.size() && ordered[next]->slot <= static_cast<int>(j)) {
      h.entries.push_back({ordered[next]->text, Origin::synthetic, ordered[next]->slot});
      ++next;
    }
  }
  if (next != ordered.size()) {
    throw ValidationError("augmented history: synthetic slot " +
                          std::to_string(ordered[next]->slot) + " beyond history of length " +
                          std::to_string(real_history.size()));
  }
  return h;
}

qg::QuestionPool prepare_pool(const corpus::Dialog& dialog, int k,
                              std::span<const qg::SyntheticQuestion> all_slots,
                              const SelectionConfig& config, const SentenceEncoder& encoder) {
  const std::string& current = dialog.turns.at(static_cast<std::size_t>(k)).question;
  qg::QuestionPool pool = qg::build_pool(dialog, k, all_slots);
  pool = filter_similar(std::move(pool), current, config.gamma, encoder);
  pool = score_pool(std::move(pool), current, encoder);
  return top_m(std::move(pool), config.M);
}

util::Rng turn_rng(std::uint64_t seed, std::string_view stream, std::string_view dialog_id,
                   int k) {
  return util::Rng(util::derive_seed(seed, stream, dialog_id, k));
}

nlohmann::json to_json(const AugmentedHistory& h, const std::string& dialog_id, int k) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : h.entries) {
    entries.push_back({{"text", e.text},
                       {"origin", e.origin == Origin::real ? "real" : "synthetic"},
                       {"slot", e.slot}});
  }
  return {{"dialog_id", dialog_id}, {"k", k}, {"entries", entries}};
}

AugmentedHistory augmented_from_json(const nlohmann::json& j) {
  try {
    AugmentedHistory h;
    for (const auto& e : j.at("entries")) {
      const std::string origin = e.at("origin").get<std::string>();
      if (origin != "real" && origin != "synthetic") {
        throw ParseError("augmented history: bad origin '" + origin + "'");
      }
      h.entries.push_back({e.at("text").get<std::string>(),
                           origin == "real" ? Origin::real : Origin::synthetic,
                           e.at("slot").get<int>()});
    }
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("augmented history: ") + e.what());
  }
}

}  // namespace cotah::selector
