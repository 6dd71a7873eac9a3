#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "ecggin/graph.hpp"

namespace ecggin::gin {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Readout { sum, mean };

/// Whether a pass uses batch statistics and dropout (training) or the
/// running batch-norm statistics with dropout disabled (inference).
enum class Mode { training, inference };

struct GinConfig {
  int input_dim = 1;
  /// Counts the input layer: num_layers - 1 GIN layers follow it and every
  /// one of the num_layers representations feeds the classifier.
  int num_layers = 5;
  int hidden_dim = 64;
  bool learn_epsilon = true;
  double epsilon = 0.0;  // initial value when learnable, constant otherwise
  double dropout = 0.5;
  Readout readout = Readout::sum;
  int num_classes = 2;
  bool batch_norm = true;
  double bn_momentum = 0.9;  // running = momentum * running + (1 - momentum) * batch
  double bn_eps = 1e-5;
  std::uint64_t seed = 0;

  /// Throws Error(InvalidConfig) naming the offending field.
  void validate() const;
};

/// Parameters of one GIN layer: Linear -> BN -> ReLU -> Linear -> BN -> ReLU.
/// Weights multiply from the right (rows are nodes).
struct LayerParams {
  Matrix w1;
  Vector b1, gamma1, beta1;
  Matrix w2;
  Vector b2, gamma2, beta2;
  double epsilon = 0.0;
};

struct Params {
  std::vector<LayerParams> layers;
  /// One linear head per representation k = 0..K, readout_k -> logits.
  std::vector<Matrix> head_w;
  std::vector<Vector> head_b;

  /// Views over every parameter tensor in a fixed canonical order.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  std::vector<std::string> tensor_names() const;

  /// Same shapes, all zeros.
  Params zeros_like() const;
};

struct BatchNormStats {
  Vector mean;
  Vector var;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  long step = 0;
};

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class GinModel {
 public:
  /// Glorot-uniform weights from config.seed, unit BN scale, zero shifts.
  explicit GinModel(const GinConfig& config);

  const GinConfig& config() const noexcept { return config_; }
  Params& params() noexcept { return params_; }
  const Params& params() const noexcept { return params_; }

  /// Two entries per GIN layer (after each linear map).
  std::vector<BatchNormStats>& running_stats() noexcept { return running_; }
  const std::vector<BatchNormStats>& running_stats() const noexcept { return running_; }

  AdamState& optimizer_state() noexcept { return adam_; }
  const AdamState& optimizer_state() const noexcept { return adam_; }

  std::mt19937_64& rng() noexcept { return rng_; }
  const std::mt19937_64& rng() const noexcept { return rng_; }

  int gin_layers() const noexcept { return config_.num_layers - 1; }
  /// Width of representation k (k = 0 is the input).
  int representation_dim(int k) const noexcept { return k == 0 ? config_.input_dim : config_.hidden_dim; }

 private:
  GinConfig config_;
  Params params_;
  std::vector<BatchNormStats> running_;
  AdamState adam_;
  std::mt19937_64 rng_;
};

/// Dense features plus the aggregation matrix of one graph, computed once
/// and reused for every batch the graph joins.
struct PreparedGraph {
  Matrix x;
  std::vector<Eigen::Triplet<double>> incoming;  // (v, u, w): v aggregates w * h_u
  int label = -1;
  int num_nodes() const noexcept { return static_cast<int>(x.rows()); }
};

PreparedGraph prepare(const Graph& g);
std::vector<PreparedGraph> prepare(const GraphCorpus& c);

/// Several graphs stacked into one block-diagonal problem.
struct GraphBatch {
  Matrix x;                 // all nodes, graph after graph
  SparseMatrix aggregate;   // row v: in-neighbour weights
  SparseMatrix pool;        // graphs x nodes readout operator
  std::vector<int> labels;
  int size() const noexcept { return static_cast<int>(pool.rows()); }
};

GraphBatch make_batch(std::span<const PreparedGraph* const> graphs, Readout readout);
GraphBatch make_batch(std::span<const PreparedGraph> graphs, Readout readout);

/// Intermediate values of one forward pass, kept for backward.
struct LayerCache {
  Matrix input;  // h^(k-1)
  Matrix agg;
  Matrix xhat1, r1;
  Vector inv_std1;
  Matrix xhat2;
  Vector inv_std2;
  Matrix output;  // h^(k)
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  std::vector<Matrix> pooled;        // readout per representation, B x d_k
  std::vector<Matrix> dropout_mask;  // per head, B x C, already scaled by 1 / (1 - p)
  Matrix logits;                     // B x C
};

struct LayerOptions {
  bool batch_norm = true;
  double bn_eps = 1e-5;
  double bn_momentum = 0.9;
  Mode mode = Mode::inference;
};

/// One GIN update: MLP((1 + eps) h_v + sum_u w(u, v) h_u), with batch norm
/// over every node of the batch after each linear map. `stats` (two
/// entries) is read in inference mode and updated in training mode.
Matrix gin_layer_forward(const Matrix& h, const SparseMatrix& aggregate, const LayerParams& layer,
                         const LayerOptions& options, std::span<BatchNormStats> stats,
                         LayerCache* cache = nullptr);
Matrix gin_layer_forward(const Matrix& h, const Graph& g, const LayerParams& layer,
                         const LayerOptions& options, std::span<BatchNormStats> stats);

/// Concatenation over layers of the per-layer node sum (or mean).
Vector readout(std::span<const Matrix> per_layer_h, Readout mode);

Matrix forward(GinModel& model, const GraphBatch& batch, Mode mode, ForwardCache* cache = nullptr);
Vector forward(GinModel& model, const Graph& g, Mode mode);

struct BackwardResult {
  double loss = 0.0;
  Params grads;
  Matrix logits;
};

/// Mean softmax cross-entropy over the batch and its gradient.
BackwardResult backward(GinModel& model, const GraphBatch& batch, Mode mode);
BackwardResult backward(GinModel& model, std::span<const Graph> graphs, std::span<const int> labels, Mode mode);

double cross_entropy(const Matrix& logits, std::span<const int> labels);

/// One Adam update with bias correction; t is the 1-based step index.
void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state, long t, double lr, const AdamOptions& options = {});

}  // namespace ecggin::gin
