#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecggin/graph.hpp"
#include "ecggin/series.hpp"

namespace ecggin {

// ---------------------------------------------------------------------------
// Visibility graphs
// ---------------------------------------------------------------------------

/// True when sample c lies strictly below the sight line joining the tops of
/// samples a and b (a < c < b). Both visibility builders share this
/// predicate so their results agree bit for bit.
inline bool below_sight_line(std::size_t a, double ya, std::size_t b, double yb, std::size_t c,
                             double yc) noexcept {
  const double tb_tc = static_cast<double>(b - c);
  const double tb_ta = static_cast<double>(b - a);
  return yc < yb + (ya - yb) * tb_tc / tb_ta;
}

/// Reference natural visibility graph: every pair checked against every
/// intermediate sample. O(n^3) worst case.
Graph nvg_naive(std::span<const double> s);
inline Graph nvg_naive(const TimeSeries& s) { return nvg_naive(std::span<const double>(s.values)); }

/// Natural visibility graph by divide and conquer on the range maximum: the
/// maximum blocks every sight line crossing it, so only its own edges are
/// computed before recursing into both sides.
Graph nvg_fast(std::span<const double> s);
inline Graph nvg_fast(const TimeSeries& s) { return nvg_fast(std::span<const double>(s.values)); }

/// Horizontal visibility graph with a monotone stack, O(n).
Graph hvg_transform(std::span<const double> s);
inline Graph hvg_transform(const TimeSeries& s) { return hvg_transform(std::span<const double>(s.values)); }

// ---------------------------------------------------------------------------
// Quantile graph
// ---------------------------------------------------------------------------

struct QuantilePartition {
  int q = 0;
  /// q - 1 non-decreasing thresholds. Repeated thresholds are allowed; the
  /// assignment rule below collapses them so equal values share a quantile.
  std::vector<double> cut_points;
  /// Sample s maps to the number of cut points strictly below it.
  std::vector<int> assignment;

  int quantile_of(double value) const noexcept;
};

struct TransitionMatrix {
  int q = 0;
  std::vector<std::vector<long>> counts;
  std::vector<std::vector<double>> normalized;  // row-stochastic; empty rows stay zero
};

struct QuantileGraph {
  Graph graph;
  TransitionMatrix transitions;
  QuantilePartition partition;
};

/// Cut point i (1..q-1) is the order statistic at 1-based rank ceil(T*i/q).
QuantilePartition quantile_partition(std::span<const double> s, int q);

/// Directed weighted graph on q quantile nodes; edge weights are the
/// row-normalized counts of lag-1 transitions between quantiles.
QuantileGraph qg_transform(std::span<const double> s, int q);

// ---------------------------------------------------------------------------
// Node features
// ---------------------------------------------------------------------------

enum class FeatureMode { amplitude, degree, constant };

struct FeatureOptions {
  FeatureMode mode = FeatureMode::amplitude;
  int degree_cap = 16;  // degree mode: one-hot of min(degree, cap), width cap + 1
};

/// Returns `g` with node features attached. In amplitude mode visibility
/// graphs take the sample value; directed (quantile) graphs take the
/// midpoint of their quantile's value interval.
Graph attach_features(Graph g, std::span<const double> s, const FeatureOptions& options);

// ---------------------------------------------------------------------------
// Corpus-level driver
// ---------------------------------------------------------------------------

enum class TransformMethod { nvg, nvg_naive, hvg, qg };

struct TransformOptions {
  TransformMethod method = TransformMethod::nvg;
  int quantiles = 24;
  FeatureOptions features;
  std::size_t jobs = 1;
};

Graph transform_series(std::span<const double> s, const TransformOptions& options);

/// Transforms every beat (in parallel when jobs > 1); output order follows
/// input order and graphs carry the beat labels.
GraphCorpus transform_beats(std::span<const Beat> beats, const TransformOptions& options);

}  // namespace ecggin
