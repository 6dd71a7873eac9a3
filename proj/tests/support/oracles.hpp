#pragma once

// Independent reference computations and generators shared by the unit and
// acceptance suites. Nothing here calls the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "ecggin/gin.hpp"
#include "ecggin/graph.hpp"
#include "ecggin/transforms.hpp"

namespace ecggin::testing {

using EdgeSet = std::set<std::pair<int, int>>;

inline EdgeSet edge_set(const Graph& g) {
  EdgeSet s;
  for (const Edge& e : g.edges) s.emplace(e.u, e.v);
  return s;
}

/// Horizontal visibility straight from the definition: every pair, every
/// intermediate sample.
inline EdgeSet hvg_brute_force(const std::vector<double>& y) {
  EdgeSet s;
  for (std::size_t a = 0; a < y.size(); ++a) {
    for (std::size_t b = a + 1; b < y.size(); ++b) {
      bool ok = true;
      for (std::size_t c = a + 1; c < b; ++c) ok = ok && std::min(y[a], y[b]) > y[c];
      if (ok) s.emplace(static_cast<int>(a), static_cast<int>(b));
    }
  }
  return s;
}

/// Natural visibility on small integer series evaluated in exact rational
/// arithmetic: y_c (t_b - t_a) < y_b (t_b - t_a) + (y_a - y_b)(t_b - t_c).
inline EdgeSet nvg_exact_integer(const std::vector<long>& y) {
  EdgeSet s;
  const long n = static_cast<long>(y.size());
  for (long a = 0; a < n; ++a) {
    for (long b = a + 1; b < n; ++b) {
      bool ok = true;
      for (long c = a + 1; c < b; ++c) {
        ok = ok && y[c] * (b - a) < y[b] * (b - a) + (y[a] - y[b]) * (b - c);
      }
      if (ok) s.emplace(static_cast<int>(a), static_cast<int>(b));
    }
  }
  return s;
}

inline std::vector<double> uniform_series(std::mt19937_64& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> s(n);
  for (double& v : s) v = d(rng);
  return s;
}

inline std::vector<int> random_permutation(std::mt19937_64& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Random undirected (or directed weighted) graph with `dim` random features.
inline Graph random_graph(std::mt19937_64& rng, int n, double density, int dim, bool directed = false) {
  Graph g;
  g.num_nodes = n;
  g.directed = directed;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int a = 0; a < n; ++a) {
    for (int b = directed ? 0 : a + 1; b < n; ++b) {
      if (u(rng) < density) g.edges.push_back({a, b, directed ? 0.1 + u(rng) : 1.0});
    }
  }
  g.node_features.resize(static_cast<std::size_t>(n));
  for (auto& row : g.node_features) {
    row.resize(static_cast<std::size_t>(dim));
    for (double& v : row) v = 2.0 * u(rng) - 1.0;
  }
  return g;
}

inline Graph path_graph(int n) {
  Graph g;
  g.num_nodes = n;
  for (int v = 0; v + 1 < n; ++v) g.edges.push_back({v, v + 1, 1.0});
  g.node_features.assign(static_cast<std::size_t>(n), {1.0});
  return g;
}

inline Graph star_graph(int n) {
  Graph g;
  g.num_nodes = n;
  for (int v = 1; v < n; ++v) g.edges.push_back({0, v, 1.0});
  g.node_features.assign(static_cast<std::size_t>(n), {1.0});
  return g;
}

/// Paths (label 0) and stars (label 1) with 5 to 12 nodes and constant
/// features.
inline GraphCorpus path_star_corpus(int per_class) {
  std::vector<Graph> graphs;
  for (int i = 0; i < per_class; ++i) {
    Graph p = path_graph(5 + i % 8);
    p.label = 0;
    graphs.push_back(std::move(p));
    Graph s = star_graph(5 + i % 8);
    s.label = 1;
    graphs.push_back(std::move(s));
  }
  GraphCorpus c;
  c.graphs = std::move(graphs);
  c.num_classes = 2;
  c.feature_dim = 1;
  return c;
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;  // tensor[index] with the largest error
};

/// Central finite differences of the batch loss against backward().
inline GradCheck finite_difference_check(gin::GinModel& model, const gin::GraphBatch& batch, gin::Mode mode,
                                         double step = 1e-5) {
  const gin::BackwardResult analytic = gin::backward(model, batch, mode);
  const auto grads = std::as_const(analytic.grads).tensors();
  auto params = model.params().tensors();

  // Training-mode passes move the running statistics; restore them after
  // every probe so each loss evaluation sees the same model.
  const auto saved_stats = model.running_stats();
  auto loss_at = [&] {
    const double l = gin::cross_entropy(gin::forward(model, batch, mode), batch.labels);
    model.running_stats() = saved_stats;
    return l;
  };

  GradCheck out;
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (!model.config().learn_epsilon && model.params().tensor_names()[t].ends_with("epsilon")) continue;
    for (std::size_t j = 0; j < params[t].size(); ++j) {
      const double orig = params[t][j];
      params[t][j] = orig + step;
      const double up = loss_at();
      params[t][j] = orig - step;
      const double down = loss_at();
      params[t][j] = orig;
      const double numeric = (up - down) / (2.0 * step);
      const double a = grads[t][j];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > out.max_rel_error) {
        out.max_rel_error = rel;
        out.worst = model.params().tensor_names()[t] + "[" + std::to_string(j) + "]";
      }
      ++out.checked;
    }
  }
  return out;
}

}  // namespace ecggin::testing
