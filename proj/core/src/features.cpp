#include <algorithm>

#include <fmt/format.h>

#include "ecggin/error.hpp"
#include "ecggin/parallel.hpp"
#include "ecggin/transforms.hpp"

namespace ecggin {

Graph attach_features(Graph g, std::span<const double> s, const FeatureOptions& options) {
  const auto n = static_cast<std::size_t>(g.num_nodes);
  g.node_features.assign(n, {});

  switch (options.mode) {
    case FeatureMode::constant:
      for (auto& row : g.node_features) row = {1.0};
      break;

    case FeatureMode::degree: {
      if (options.degree_cap < 0) throw Error(ErrorCode::InvalidConfig, "degree cap must be non-negative");
      const auto width = static_cast<std::size_t>(options.degree_cap) + 1;
      const std::vector<int> deg = degrees(g);
      for (std::size_t v = 0; v < n; ++v) {
        g.node_features[v].assign(width, 0.0);
        g.node_features[v][static_cast<std::size_t>(std::min(deg[v], options.degree_cap))] = 1.0;
      }
      break;
    }

    case FeatureMode::amplitude:
      if (g.directed) {
        // Quantile node i stands for the value interval (cut[i-1], cut[i]].
        const QuantilePartition p = quantile_partition(s, g.num_nodes);
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        for (std::size_t i = 0; i < n; ++i) {
          const double lower = i == 0 ? *lo : p.cut_points[i - 1];
          const double upper = i + 1 == n ? *hi : p.cut_points[i];
          g.node_features[i] = {0.5 * (lower + upper)};
        }
      } else {
        if (n != s.size()) {
          throw Error(ErrorCode::ModeMismatch,
                      fmt::format("amplitude features need one sample per node ({} nodes, {} samples)", n, s.size()));
        }
        for (std::size_t v = 0; v < n; ++v) g.node_features[v] = {s[v]};
      }
      break;
  }
  return g;
}

Graph transform_series(std::span<const double> s, const TransformOptions& options) {
  Graph g;
  switch (options.method) {
    case TransformMethod::nvg: g = nvg_fast(s); break;
    case TransformMethod::nvg_naive: g = nvg_naive(s); break;
    case TransformMethod::hvg: g = hvg_transform(s); break;
    case TransformMethod::qg: g = qg_transform(s, options.quantiles).graph; break;
  }
  return attach_features(std::move(g), s, options.features);
}

GraphCorpus transform_beats(std::span<const Beat> beats, const TransformOptions& options) {
  std::vector<Graph> graphs(beats.size());
  parallel_for(beats.size(), options.jobs, [&](std::size_t i) {
    graphs[i] = transform_series(beats[i].samples, options);
    graphs[i].label = beats[i].label;
  });
  return make_corpus(std::move(graphs));
}

}  // namespace ecggin
