#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ecggin {

struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge& a, const Edge& b) {
    if (auto c = a.u <=> b.u; c != 0) return c;
    return a.v <=> b.v;
  }
};

/// Node-indexed graph with per-node real feature vectors.
///
/// Undirected graphs store every edge once with u < v. Directed graphs
/// (quantile graphs) may carry self-loops. Edges are kept sorted by (u, v).
struct Graph {
  int num_nodes = 0;
  std::vector<Edge> edges;
  bool directed = false;
  std::vector<std::vector<double>> node_features;
  std::optional<int> label;

  std::size_t feature_dim() const noexcept {
    return node_features.empty() ? 0 : node_features.front().size();
  }

  friend bool operator==(const Graph&, const Graph&) = default;
};

struct GraphCorpus {
  std::vector<Graph> graphs;
  int num_classes = 0;
  std::size_t feature_dim = 0;

  friend bool operator==(const GraphCorpus&, const GraphCorpus&) = default;
};

/// Throws Error(InvalidGraph) describing the first violated invariant.
void validate(const Graph& g);
void validate(const GraphCorpus& c);

/// Builds a corpus from labelled graphs; num_classes = max label + 1.
GraphCorpus make_corpus(std::vector<Graph> graphs);

/// Edge count per node. For directed graphs both endpoints count and a
/// self-loop counts once.
std::vector<int> degrees(const Graph& g);

/// True when every node is reachable from node 0 ignoring direction.
bool is_connected(const Graph& g);

/// Moves node i to perm[i]. Throws Error(InvalidPermutation).
Graph relabel(const Graph& g, std::span<const int> perm);

/// One JSON object per graph per line:
///   {"n":..,"directed":..,"edges":[[u,v,w],..],"x":[[..],..],"y":..}
/// Doubles are written in shortest round-trip form.
void serialize_corpus(const GraphCorpus& c, std::ostream& sink);
GraphCorpus deserialize_corpus(std::istream& source);

void write_corpus(const GraphCorpus& c, const std::string& path);
GraphCorpus read_corpus(const std::string& path);

}  // namespace ecggin
