#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "cotah/corpus.hpp"
#include "cotah/util.hpp"

namespace cotah::corpus {
namespace {

struct Assignment {
  std::vector<std::size_t> order;  // shuffled dialog indices
  std::vector<int> side;           // 0 = dev, 1 = test, indexed like `order`
  std::vector<long> size;
  long count[2] = {0, 0};

  long gap() const { return count[0] - count[1]; }
};

// First dialog (in shuffled order) of each size on `side`.
std::map<long, std::size_t> size_index(const Assignment& a, int side) {
  std::map<long, std::size_t> index;
  for (std::size_t i = 0; i < a.order.size(); ++i) {
    if (a.side[i] == side) index.try_emplace(a.size[i], i);
  }
  return index;
}

long side_dialogs(const Assignment& a, int side) {
  return std::count(a.side.begin(), a.side.end(), side);
}

constexpr long kAcceptableGap = 2;

// One move or swap that strictly shrinks |gap|; false when none exists or
// the greedy result is already within kAcceptableGap.
bool improve(Assignment& a) {
  const long gap = a.gap();
  if (std::labs(gap) <= kAcceptableGap) return false;
  const int big = gap > 0 ? 0 : 1;
  const long abs_gap = std::labs(gap);
  const auto big_sizes = size_index(a, big);
  const auto small_sizes = size_index(a, 1 - big);

  long best = abs_gap;
  std::size_t move_from = a.order.size();
  std::size_t move_to = a.order.size();
  if (side_dialogs(a, big) > 1) {
    for (const auto& [s, i] : big_sizes) {
      const long after = std::labs(abs_gap - 2 * s);
      if (after < best) {
        best = after;
        move_from = i;
        move_to = a.order.size();
      }
    }
  }
  for (const auto& [sb, i] : big_sizes) {
    for (const auto& [ss, j] : small_sizes) {
      if (sb <= ss) continue;
      const long after = std::labs(abs_gap - 2 * (sb - ss));
      if (after < best) {
        best = after;
        move_from = i;
        move_to = j;
      }
    }
  }
  if (move_from == a.order.size()) return false;
  auto flip = [&](std::size_t i) {
    a.count[a.side[i]] -= a.size[i];
    a.side[i] = 1 - a.side[i];
    a.count[a.side[i]] += a.size[i];
  };
  flip(move_from);
  if (move_to != a.order.size()) flip(move_to);
  return true;
}

}  // namespace

Split split_dev_test(std::span<const Dialog> dialogs, std::uint64_t seed) {
  if (dialogs.size() < 2) {
    throw ValidationError("split needs at least 2 dialogs, got " +
                          std::to_string(dialogs.size()));
  }
  Assignment a;
  a.order.resize(dialogs.size());
  for (std::size_t i = 0; i < dialogs.size(); ++i) a.order[i] = i;
  std::sort(a.order.begin(), a.order.end(), [&](std::size_t x, std::size_t y) {
    return dialogs[x].dialog_id < dialogs[y].dialog_id;
  });
  util::Rng rng(seed);
  rng.shuffle(a.order);

  for (std::size_t idx : a.order) {
    const long n = static_cast<long>(dialogs[idx].turns.size());
    const int side = a.count[0] <= a.count[1] ? 0 : 1;
    a.side.push_back(side);
    a.size.push_back(n);
    a.count[side] += n;
  }
  while (improve(a)) {
  }

  Split split;
  split.seed = seed;
  for (std::size_t i = 0; i < a.order.size(); ++i) {
    auto& ids = a.side[i] == 0 ? split.dev_dialog_ids : split.test_dialog_ids;
    ids.push_back(dialogs[a.order[i]].dialog_id);
  }
  std::sort(split.dev_dialog_ids.begin(), split.dev_dialog_ids.end());
  std::sort(split.test_dialog_ids.begin(), split.test_dialog_ids.end());
  return split;
}

nlohmann::json to_json(const Split& split) {
  return {{"seed", split.seed},
          {"dev_dialog_ids", split.dev_dialog_ids},
          {"test_dialog_ids", split.test_dialog_ids}};
}

Split split_from_json(const nlohmann::json& j) {
  try {
    Split s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.dev_dialog_ids = j.at("dev_dialog_ids").get<std::vector<std::string>>();
    s.test_dialog_ids = j.at("test_dialog_ids").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("split manifest: ") + e.what());
  }
}

std::string dialog_set_digest(std::span<const std::string> dialog_ids) {
  std::vector<std::string> ids(dialog_ids.begin(), dialog_ids.end());
  std::sort(ids.begin(), ids.end());
  std::uint64_t h = util::fnv1a("");
  for (const auto& id : ids) {
    h = util::fnv1a(id, h);
    h = util::fnv1a("\n", h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf) + "-" + std::to_string(ids.size());
}

}  // namespace cotah::corpus
