#include <algorithm>

#include <fmt/format.h>

#include "ecggin/error.hpp"
#include "ecggin/series.hpp"
#include "ecggin/transforms.hpp"

namespace ecggin {

int QuantilePartition::quantile_of(double value) const noexcept {
  return static_cast<int>(std::lower_bound(cut_points.begin(), cut_points.end(), value) - cut_points.begin());
}

QuantilePartition quantile_partition(std::span<const double> s, int q) {
  if (q < 2) throw Error(ErrorCode::InvalidQ, fmt::format("need at least 2 quantiles, got {}", q));
  require_finite(s);

  std::vector<double> sorted(s.begin(), s.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t t = sorted.size();
  const auto qq = static_cast<std::size_t>(q);

  QuantilePartition p;
  p.q = q;
  p.cut_points.reserve(qq - 1);
  for (std::size_t i = 1; i < qq; ++i) {
    const std::size_t rank = (t * i + qq - 1) / qq;  // ceil(T * i / Q), >= 1
    p.cut_points.push_back(sorted[rank - 1]);
  }
  p.assignment.reserve(t);
  for (double v : s) p.assignment.push_back(p.quantile_of(v));
  return p;
}

QuantileGraph qg_transform(std::span<const double> s, int q) {
  if (q < 2) throw Error(ErrorCode::InvalidQ, fmt::format("need at least 2 quantiles, got {}", q));
  if (s.size() < 2) throw Error(ErrorCode::SeriesTooShort, "quantile graph needs at least 2 samples");

  QuantileGraph out;
  out.partition = quantile_partition(s, q);
  const auto qq = static_cast<std::size_t>(q);

  TransitionMatrix& tm = out.transitions;
  tm.q = q;
  tm.counts.assign(qq, std::vector<long>(qq, 0));
  tm.normalized.assign(qq, std::vector<double>(qq, 0.0));
  const auto& a = out.partition.assignment;
  for (std::size_t t = 0; t + 1 < a.size(); ++t) {
    ++tm.counts[static_cast<std::size_t>(a[t])][static_cast<std::size_t>(a[t + 1])];
  }

  Graph& g = out.graph;
  g.num_nodes = q;
  g.directed = true;
  for (std::size_t i = 0; i < qq; ++i) {
    long row = 0;
    for (long c : tm.counts[i]) row += c;
    if (row == 0) continue;
    for (std::size_t j = 0; j < qq; ++j) {
      if (tm.counts[i][j] == 0) continue;
      const double w = static_cast<double>(tm.counts[i][j]) / static_cast<double>(row);
      tm.normalized[i][j] = w;
      g.edges.push_back({static_cast<int>(i), static_cast<int>(j), w});
    }
  }
  return out;
}

}  // namespace ecggin
