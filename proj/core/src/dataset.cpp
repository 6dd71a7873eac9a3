#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

#include <fmt/format.h>

#include "ecggin/dataset.hpp"
#include "ecggin/error.hpp"

namespace ecggin {

namespace {

/// Member indices per label, in input order.
std::map<int, std::vector<std::size_t>> members_by_label(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> by;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw Error(ErrorCode::InvalidConfig, fmt::format("sample {} has negative label", i));
    by[labels[i]].push_back(i);
  }
  return by;
}

}  // namespace

std::vector<std::size_t> balance_indices(std::span<const int> labels) {
  const auto by = members_by_label(labels);
  if (by.size() < 2) throw Error(ErrorCode::SingleClass, "balancing needs at least two classes");

  std::size_t target = 0;
  for (const auto& [label, members] : by) target = std::max(target, members.size());

  std::vector<std::size_t> out(labels.size());
  std::iota(out.begin(), out.end(), std::size_t{0});
  for (const auto& [label, members] : by) {
    for (std::size_t extra = 0; members.size() + extra < target; ++extra) {
      out.push_back(members[extra % members.size()]);
    }
  }
  return out;
}

BalancedBeats balance_by_duplication(std::span<const Beat> beats) {
  std::vector<int> labels;
  labels.reserve(beats.size());
  for (const Beat& b : beats) labels.push_back(b.label);

  BalancedBeats out;
  out.origin = balance_indices(labels);
  out.beats.reserve(out.origin.size());
  for (std::size_t i : out.origin) out.beats.push_back(beats[i]);
  return out;
}

std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::size_t per_class,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen;
  for (auto& [label, members] : members_by_label(labels)) {
    if (members.size() < per_class) {
      throw Error(ErrorCode::TooFewSamples,
                  fmt::format("class {} has {} samples, {} requested", label, members.size(), per_class));
    }
    std::shuffle(members.begin(), members.end(), rng);
    chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(per_class));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<Fold> stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed,
                                   std::span<const std::size_t> groups) {
  if (k < 2) throw Error(ErrorCode::InvalidConfig, fmt::format("need at least 2 folds, got {}", k));
  if (!groups.empty() && groups.size() != labels.size()) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("{} group ids for {} samples", groups.size(), labels.size()));
  }
  const auto kk = static_cast<std::size_t>(k);

  // A unit is the set of samples that must share a fold.
  struct Unit {
    int label = 0;
    std::vector<std::size_t> members;
  };
  std::vector<Unit> units;
  std::map<std::size_t, std::size_t> unit_of_group;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw Error(ErrorCode::InvalidConfig, fmt::format("sample {} has negative label", i));
    const std::size_t gid = groups.empty() ? i : groups[i];
    auto [it, fresh] = unit_of_group.try_emplace(gid, units.size());
    if (fresh) units.push_back({labels[i], {}});
    Unit& u = units[it->second];
    if (u.label != labels[i]) {
      throw Error(ErrorCode::InvalidConfig, fmt::format("group {} mixes labels {} and {}", gid, u.label, labels[i]));
    }
    u.members.push_back(i);
  }

  std::map<int, std::vector<std::size_t>> units_by_label;
  for (std::size_t u = 0; u < units.size(); ++u) units_by_label[units[u].label].push_back(u);

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> validation(kk);
  std::vector<std::size_t> fold_total(kk, 0);
  for (auto& [label, ids] : units_by_label) {
    if (ids.size() < kk) {
      throw Error(ErrorCode::TooFewSamples,
                  fmt::format("class {} has {} independent samples, {} folds need at least that many", label,
                              ids.size(), k));
    }
    std::shuffle(ids.begin(), ids.end(), rng);
    std::stable_sort(ids.begin(), ids.end(),
                     [&](std::size_t a, std::size_t b) { return units[a].members.size() > units[b].members.size(); });

    // Greedy: fewest of this class first, then smallest fold, then lowest index.
    std::vector<std::size_t> fold_class(kk, 0);
    for (std::size_t u : ids) {
      std::size_t best = 0;
      for (std::size_t f = 1; f < kk; ++f) {
        if (std::tie(fold_class[f], fold_total[f]) < std::tie(fold_class[best], fold_total[best])) best = f;
      }
      const std::size_t size = units[u].members.size();
      fold_class[best] += size;
      fold_total[best] += size;
      auto& v = validation[best];
      v.insert(v.end(), units[u].members.begin(), units[u].members.end());
    }
  }

  std::vector<Fold> folds(kk);
  for (std::size_t f = 0; f < kk; ++f) {
    std::sort(validation[f].begin(), validation[f].end());
    folds[f].validation = std::move(validation[f]);
    std::vector<char> in_val(labels.size(), 0);
    for (std::size_t i : folds[f].validation) in_val[i] = 1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!in_val[i]) folds[f].train.push_back(i);
    }
  }
  return folds;
}

}  // namespace ecggin
