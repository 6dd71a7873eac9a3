#include "ecggin/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ecggin/error.hpp"

namespace ecggin {

void validate(const Graph& g) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidGraph, msg); };
  if (g.num_nodes < 0) fail("negative node count");

  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const Edge& e = g.edges[i];
    if (e.u < 0 || e.v < 0 || e.u >= g.num_nodes || e.v >= g.num_nodes) {
      fail(fmt::format("edge {} ({}, {}) out of range for {} nodes", i, e.u, e.v, g.num_nodes));
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) fail(fmt::format("edge {} has non-positive weight {}", i, e.w));
    if (!g.directed) {
      if (e.u >= e.v) fail(fmt::format("undirected edge {} must satisfy u < v, got ({}, {})", i, e.u, e.v));
      if (e.w != 1.0) fail(fmt::format("undirected edge {} has weight {}, expected 1", i, e.w));
    }
    if (i > 0 && !(g.edges[i - 1] < e)) {
      fail(fmt::format("edges not strictly sorted at {} (duplicate or out of order)", i));
    }
  }

  if (!g.node_features.empty()) {
    if (static_cast<int>(g.node_features.size()) != g.num_nodes) {
      fail(fmt::format("{} feature rows for {} nodes", g.node_features.size(), g.num_nodes));
    }
    const std::size_t d = g.node_features.front().size();
    if (d == 0) fail("feature dimension must be at least 1");
    for (std::size_t v = 0; v < g.node_features.size(); ++v) {
      if (g.node_features[v].size() != d) fail(fmt::format("node {} has feature width {}, expected {}", v,
                                                           g.node_features[v].size(), d));
    }
  }
}

void validate(const GraphCorpus& c) {
  for (std::size_t i = 0; i < c.graphs.size(); ++i) {
    const Graph& g = c.graphs[i];
    try {
      validate(g);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidGraph, fmt::format("graph {}: {}", i, e.what()));
    }
    if (!g.label || *g.label < 0 || *g.label >= c.num_classes) {
      throw Error(ErrorCode::InvalidGraph, fmt::format("graph {} has no label in [0, {})", i, c.num_classes));
    }
    if (g.feature_dim() != c.feature_dim) {
      throw Error(ErrorCode::InvalidGraph,
                  fmt::format("graph {} has feature width {}, corpus uses {}", i, g.feature_dim(), c.feature_dim));
    }
  }
}

GraphCorpus make_corpus(std::vector<Graph> graphs) {
  GraphCorpus c;
  int max_label = -1;
  for (const Graph& g : graphs) {
    if (g.label) max_label = std::max(max_label, *g.label);
  }
  c.num_classes = max_label + 1;
  c.feature_dim = graphs.empty() ? 0 : graphs.front().feature_dim();
  c.graphs = std::move(graphs);
  return c;
}

std::vector<int> degrees(const Graph& g) {
  std::vector<int> deg(static_cast<std::size_t>(g.num_nodes), 0);
  for (const Edge& e : g.edges) {
    ++deg[static_cast<std::size_t>(e.u)];
    if (e.v != e.u) ++deg[static_cast<std::size_t>(e.v)];
  }
  return deg;
}

bool is_connected(const Graph& g) {
  if (g.num_nodes <= 1) return true;
  std::vector<int> parent(static_cast<std::size_t>(g.num_nodes));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = g.num_nodes;
  for (const Edge& e : g.edges) {
    const int a = find(e.u);
    const int b = find(e.v);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }
  return components == 1;
}

Graph relabel(const Graph& g, std::span<const int> perm) {
  const auto n = static_cast<std::size_t>(g.num_nodes);
  if (perm.size() != n) {
    throw Error(ErrorCode::InvalidPermutation, fmt::format("permutation has {} entries for {} nodes", perm.size(), n));
  }
  std::vector<char> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || static_cast<std::size_t>(p) >= n || seen[static_cast<std::size_t>(p)]) {
      throw Error(ErrorCode::InvalidPermutation, "permutation is not a bijection");
    }
    seen[static_cast<std::size_t>(p)] = 1;
  }

  Graph out;
  out.num_nodes = g.num_nodes;
  out.directed = g.directed;
  out.label = g.label;
  out.edges.reserve(g.edges.size());
  for (const Edge& e : g.edges) {
    int u = perm[static_cast<std::size_t>(e.u)];
    int v = perm[static_cast<std::size_t>(e.v)];
    if (!g.directed && u > v) std::swap(u, v);
    out.edges.push_back({u, v, e.w});
  }
  std::sort(out.edges.begin(), out.edges.end());

  if (!g.node_features.empty()) {
    out.node_features.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.node_features[static_cast<std::size_t>(perm[i])] = g.node_features[i];
  }
  return out;
}

}  // namespace ecggin
