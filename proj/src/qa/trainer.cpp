#include <algorithm>
#include <map>

#include "cotah/qa.hpp"
#include "cotah/util.hpp"

namespace cotah::qa {
namespace {

// d CE / d logits for one head: 0.5 * (p - onehot(gold)) * scale.
std::vector<double> ce_head_grad(const std::vector<double>& p, std::size_t gold, double scale) {
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) g[i] = 0.5 * scale * p[i];
  g[gold] -= 0.5 * scale;
  return g;
}

// d KL(target || softmax(z)) / d z for one head, target constant:
// 0.5 * (q - target) * scale.
std::vector<double> kl_head_grad(const std::vector<double>& q, const std::vector<double>& target,
                                 double scale) {
  std::vector<double> g(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) g[i] = 0.5 * scale * (q[i] - target[i]);
  return g;
}

}  // namespace

StepResult accumulate_gradients(ReaderBackend& reader, std::span<const TrainExample> batch,
                                const TrainConfig& config) {
  reader.zero_grad();
  StepResult result;
  if (batch.empty()) return result;
  const double per_example = 1.0 / static_cast<double>(batch.size());
  for (const TrainExample& ex : batch) {
    LossBreakdown loss;
    const AnswerDistribution real = reader.forward(ex.input_real);
    ++result.forward_passes;
    loss.l_ce = ce_loss(real, ex.gold);
    reader.backward(ex.input_real, {ce_head_grad(real.start, ex.gold.start_pos, per_example),
                                    ce_head_grad(real.end, ex.gold.end_pos, per_example)});

    if (ex.input_aug && ex.k >= config.tau) {
      const AnswerDistribution aug = reader.forward(*ex.input_aug);
      ++result.forward_passes;
      loss.l_cons = consistency_loss(real, aug);
      if (config.lambda != 0.0) {
        // `real` enters only as a constant target: no gradient flows back
        // through the real-history pass from this term.
        const double scale = config.lambda * per_example;
        reader.backward(*ex.input_aug, {kl_head_grad(aug.start, real.start, scale),
                                        kl_head_grad(aug.end, real.end, scale)});
      }
    }
    loss.l_total = total_loss(loss.l_ce, loss.l_cons, config.lambda, ex.k, config.tau);
    result.mean.l_ce += loss.l_ce * per_example;
    result.mean.l_cons += loss.l_cons * per_example;
    result.mean.l_total += loss.l_total * per_example;
    result.examples.push_back(loss);
  }
  return result;
}

StepResult train_step(ReaderBackend& reader, std::span<const TrainExample> batch,
                      const TrainConfig& config, util::Adam& optimizer) {
  StepResult result = accumulate_gradients(reader, batch, config);
  if (!batch.empty()) optimizer.step(reader.parameters(), reader.gradients());
  return result;
}

TrainingLog train_qa(ReaderBackend& reader, std::span<const corpus::Dialog> dialogs,
                     const HistoryProvider& histories, const TrainConfig& config) {
  TrainingLog log;
  std::vector<TrainExample> examples;
  for (const auto& dialog : dialogs) {
    for (const auto& turn : dialog.turns) {
      const int k = turn.turn_index;
      TrainExample ex;
      ex.dialog_id = dialog.dialog_id;
      ex.k = k;
      ex.input_real = serialize_reader_input(turn.question, dialog.history_questions(k),
                                             *dialog.document, config.input_budget);
      const auto gold = gold_span(turn, ex.input_real);
      if (!gold) {
        ++log.skipped;
        continue;
      }
      ex.gold = *gold;
      examples.push_back(std::move(ex));
    }
  }
  std::map<std::string_view, const corpus::Dialog*> by_id;
  for (const auto& d : dialogs) by_id[d.dialog_id] = &d;

  const bool augment = config.S > 0;
  util::Adam optimizer(reader.parameters().size(),
                       util::Adam::Options{.learning_rate = config.learning_rate});
  const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);
  std::size_t step = 0;
  std::vector<std::size_t> order(examples.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (augment) {
      for (auto& ex : examples) {
        if (ex.k < config.tau) continue;
        const corpus::Dialog& dialog = *by_id.at(ex.dialog_id);
        const auto h = histories ? histories(dialog, ex.k, epoch) : std::nullopt;
        if (!h && config.lambda != 0.0) {
          throw ValidationError("missing augmented history for dialog " + ex.dialog_id +
                                " turn " + std::to_string(ex.k));
        }
        if (!h) {
          ex.input_aug.reset();
          continue;
        }
        ex.input_aug = serialize_reader_input(dialog.turns[ex.k].question, h->questions(),
                                              *dialog.document, config.input_budget);
      }
    }
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    util::Rng rng(util::derive_seed(config.seed, "train-qa", "", epoch));
    rng.shuffle(order);

    EpochRecord rec;
    rec.epoch = epoch;
    double cons_sum = 0.0;
    std::vector<TrainExample> batch;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      batch.clear();
      const std::size_t stop = std::min(order.size(), start + batch_size);
      for (std::size_t i = start; i < stop; ++i) batch.push_back(examples[order[i]]);
      const StepResult r = train_step(reader, batch, config, optimizer);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const LossBreakdown& l = r.examples[i];
        log.steps.push_back({epoch, step, batch[i].dialog_id, batch[i].k, l});
        rec.mean_l_ce += l.l_ce;
        rec.mean_l_total += l.l_total;
        if (batch[i].input_aug && batch[i].k >= config.tau) {
          cons_sum += l.l_cons;
          ++rec.augmented;
        }
        ++rec.examples;
      }
      ++step;
    }
    if (rec.examples > 0) {
      rec.mean_l_ce /= static_cast<double>(rec.examples);
      rec.mean_l_total /= static_cast<double>(rec.examples);
    }
    rec.mean_l_cons = rec.augmented > 0 ? cons_sum / static_cast<double>(rec.augmented) : 0.0;
    log.epochs.push_back(rec);
  }
  return log;
}

nlohmann::json to_json(const EpochRecord& e) {
  return {{"epoch", e.epoch},
          {"examples", e.examples},
          {"augmented", e.augmented},
          {"mean_l_ce", e.mean_l_ce},
          {"mean_l_cons", e.mean_l_cons},
          {"mean_l_total", e.mean_l_total}};
}

nlohmann::json to_json(const StepRecord& s) {
  return {{"epoch", s.epoch},
          {"step", s.step},
          {"dialog_id", s.dialog_id},
          {"k", s.k},
          {"l_ce", s.loss.l_ce},
          {"l_cons", s.loss.l_cons},
          {"l_total", s.loss.l_total}};
}

}  // namespace cotah::qa
