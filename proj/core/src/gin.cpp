#include "ecggin/gin.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ecggin/error.hpp"

namespace ecggin::gin {

void GinConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (input_dim < 1) fail(fmt::format("input_dim must be >= 1, got {}", input_dim));
  if (num_layers < 2) fail(fmt::format("num_layers must be >= 2, got {}", num_layers));
  if (hidden_dim < 1) fail(fmt::format("hidden_dim must be >= 1, got {}", hidden_dim));
  if (!(dropout >= 0.0 && dropout <= 0.5)) fail(fmt::format("dropout must lie in [0, 0.5], got {}", dropout));
  if (num_classes < 1) fail(fmt::format("num_classes must be >= 1, got {}", num_classes));
  if (!(bn_momentum >= 0.0 && bn_momentum < 1.0)) fail("bn_momentum must lie in [0, 1)");
  if (!(bn_eps > 0.0)) fail("bn_eps must be positive");
  if (!std::isfinite(epsilon)) fail("epsilon must be finite");
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

namespace {

template <class P, class Fn>
void for_each_tensor(P& p, Fn&& fn) {
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto& L = p.layers[l];
    fn(L.w1.data(), L.w1.size(), fmt::format("layer{}.w1", l));
    fn(L.b1.data(), L.b1.size(), fmt::format("layer{}.b1", l));
    fn(L.gamma1.data(), L.gamma1.size(), fmt::format("layer{}.gamma1", l));
    fn(L.beta1.data(), L.beta1.size(), fmt::format("layer{}.beta1", l));
    fn(L.w2.data(), L.w2.size(), fmt::format("layer{}.w2", l));
    fn(L.b2.data(), L.b2.size(), fmt::format("layer{}.b2", l));
    fn(L.gamma2.data(), L.gamma2.size(), fmt::format("layer{}.gamma2", l));
    fn(L.beta2.data(), L.beta2.size(), fmt::format("layer{}.beta2", l));
    fn(&L.epsilon, Eigen::Index{1}, fmt::format("layer{}.epsilon", l));
  }
  for (std::size_t k = 0; k < p.head_w.size(); ++k) {
    fn(p.head_w[k].data(), p.head_w[k].size(), fmt::format("head{}.w", k));
    fn(p.head_b[k].data(), p.head_b[k].size(), fmt::format("head{}.b", k));
  }
}

}  // namespace

std::vector<std::span<double>> Params::tensors() {
  std::vector<std::span<double>> out;
  for_each_tensor(*this, [&](double* d, Eigen::Index n, const std::string&) {
    out.emplace_back(d, static_cast<std::size_t>(n));
  });
  return out;
}

std::vector<std::span<const double>> Params::tensors() const {
  std::vector<std::span<const double>> out;
  for_each_tensor(*this, [&](const double* d, Eigen::Index n, const std::string&) {
    out.emplace_back(d, static_cast<std::size_t>(n));
  });
  return out;
}

std::vector<std::string> Params::tensor_names() const {
  std::vector<std::string> out;
  for_each_tensor(*this, [&](const double*, Eigen::Index, const std::string& name) { out.push_back(name); });
  return out;
}

Params Params::zeros_like() const {
  Params z = *this;
  for (auto t : z.tensors()) std::fill(t.begin(), t.end(), 0.0);
  return z;
}

GinModel::GinModel(const GinConfig& config) : config_(config), rng_(config.seed ^ 0x9e3779b97f4a7c15ULL) {
  config_.validate();
  std::mt19937_64 init_rng(config_.seed);
  auto glorot = [&](int fan_in, int fan_out) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-a, a);
    Matrix m(fan_in, fan_out);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(init_rng);
    return m;
  };

  const int h = config_.hidden_dim;
  for (int l = 0; l < gin_layers(); ++l) {
    LayerParams L;
    L.w1 = glorot(representation_dim(l), h);
    L.b1 = Vector::Zero(h);
    L.gamma1 = Vector::Ones(h);
    L.beta1 = Vector::Zero(h);
    L.w2 = glorot(h, h);
    L.b2 = Vector::Zero(h);
    L.gamma2 = Vector::Ones(h);
    L.beta2 = Vector::Zero(h);
    L.epsilon = config_.epsilon;
    params_.layers.push_back(std::move(L));
    running_.push_back({Vector::Zero(h), Vector::Ones(h)});
    running_.push_back({Vector::Zero(h), Vector::Ones(h)});
  }
  for (int k = 0; k < config_.num_layers; ++k) {
    params_.head_w.push_back(glorot(representation_dim(k), config_.num_classes));
    params_.head_b.push_back(Vector::Zero(config_.num_classes));
  }
  for (auto t : params_.tensors()) {
    adam_.m.emplace_back(t.size(), 0.0);
    adam_.v.emplace_back(t.size(), 0.0);
  }
}

// ---------------------------------------------------------------------------
// Batches
// ---------------------------------------------------------------------------

PreparedGraph prepare(const Graph& g) {
  if (g.num_nodes == 0) throw Error(ErrorCode::EmptyGraph, "graph has no nodes");
  if (static_cast<int>(g.node_features.size()) != g.num_nodes) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("graph has {} nodes but {} feature rows", g.num_nodes, g.node_features.size()));
  }
  PreparedGraph p;
  const auto d = static_cast<Eigen::Index>(g.feature_dim());
  p.x.resize(g.num_nodes, d);
  for (int v = 0; v < g.num_nodes; ++v) {
    const auto& row = g.node_features[static_cast<std::size_t>(v)];
    if (static_cast<Eigen::Index>(row.size()) != d) throw Error(ErrorCode::ShapeMismatch, "ragged node features");
    for (Eigen::Index j = 0; j < d; ++j) p.x(v, j) = row[static_cast<std::size_t>(j)];
  }
  p.incoming.reserve(g.edges.size() * (g.directed ? 1 : 2));
  for (const Edge& e : g.edges) {
    p.incoming.emplace_back(e.v, e.u, e.w);
    if (!g.directed) p.incoming.emplace_back(e.u, e.v, e.w);
  }
  p.label = g.label.value_or(-1);
  return p;
}

std::vector<PreparedGraph> prepare(const GraphCorpus& c) {
  std::vector<PreparedGraph> out;
  out.reserve(c.graphs.size());
  for (const Graph& g : c.graphs) out.push_back(prepare(g));
  return out;
}

GraphBatch make_batch(std::span<const PreparedGraph* const> graphs, Readout readout) {
  if (graphs.empty()) throw Error(ErrorCode::EmptyCorpus, "batch is empty");
  Eigen::Index nodes = 0;
  std::size_t nnz = 0;
  const Eigen::Index d = graphs.front()->x.cols();
  for (const PreparedGraph* g : graphs) {
    if (g->num_nodes() == 0) throw Error(ErrorCode::EmptyGraph, "graph has no nodes");
    if (g->x.cols() != d) throw Error(ErrorCode::ShapeMismatch, "graphs in a batch differ in feature width");
    nodes += g->num_nodes();
    nnz += g->incoming.size();
  }

  GraphBatch b;
  b.x.resize(nodes, d);
  std::vector<Eigen::Triplet<double>> agg;
  std::vector<Eigen::Triplet<double>> pool;
  agg.reserve(nnz);
  pool.reserve(static_cast<std::size_t>(nodes));
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const PreparedGraph& g = *graphs[i];
    const int n = g.num_nodes();
    b.x.middleRows(offset, n) = g.x;
    for (const auto& t : g.incoming) {
      agg.emplace_back(t.row() + offset, t.col() + offset, t.value());
    }
    const double scale = readout == Readout::mean ? 1.0 / n : 1.0;
    for (int v = 0; v < n; ++v) pool.emplace_back(static_cast<Eigen::Index>(i), offset + v, scale);
    b.labels.push_back(g.label);
    offset += n;
  }
  b.aggregate.resize(nodes, nodes);
  b.aggregate.setFromTriplets(agg.begin(), agg.end());
  b.pool.resize(static_cast<Eigen::Index>(graphs.size()), nodes);
  b.pool.setFromTriplets(pool.begin(), pool.end());
  return b;
}

GraphBatch make_batch(std::span<const PreparedGraph> graphs, Readout readout) {
  std::vector<const PreparedGraph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const auto& g : graphs) ptrs.push_back(&g);
  return make_batch(std::span<const PreparedGraph* const>(ptrs), readout);
}

// ---------------------------------------------------------------------------
// Forward
// ---------------------------------------------------------------------------

namespace {

/// Sum over rows, accumulated row by row.
template <class Derived>
Eigen::RowVectorXd column_sums(const Eigen::MatrixBase<Derived>& m) {
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) acc += m.row(i);
  return acc;
}

/// Per-column normalization y = gamma * xhat + beta; identity when disabled.
Matrix batch_norm_forward(const Matrix& z, const Vector& gamma, const Vector& beta, BatchNormStats& stats,
                          const LayerOptions& options, Matrix* xhat_out, Vector* inv_std_out) {
  if (!options.batch_norm) return z;

  Vector mean;
  Vector inv_std;
  if (options.mode == Mode::training) {
    const auto n = static_cast<double>(z.rows());
    mean = column_sums(z).transpose() / n;
    const Vector var = column_sums((z.rowwise() - mean.transpose()).array().square().matrix()).transpose() / n;
    inv_std = (var.array() + options.bn_eps).rsqrt();
    const double unbias = z.rows() > 1 ? n / (n - 1.0) : 1.0;
    stats.mean = options.bn_momentum * stats.mean + (1.0 - options.bn_momentum) * mean;
    stats.var = options.bn_momentum * stats.var + (1.0 - options.bn_momentum) * unbias * var;
  } else {
    mean = stats.mean;
    inv_std = (stats.var.array() + options.bn_eps).rsqrt();
  }

  Matrix xhat = (z.rowwise() - mean.transpose()).array().rowwise() * inv_std.transpose().array();
  Matrix y = (xhat.array().rowwise() * gamma.transpose().array()).rowwise() + beta.transpose().array();
  if (xhat_out) *xhat_out = std::move(xhat);
  if (inv_std_out) *inv_std_out = std::move(inv_std);
  return y;
}

Matrix batch_norm_backward(const Matrix& dy, const Vector& gamma, const Matrix& xhat, const Vector& inv_std,
                           const LayerOptions& options, Vector& dgamma, Vector& dbeta) {
  if (!options.batch_norm) return dy;
  dgamma += column_sums(dy.cwiseProduct(xhat)).transpose();
  dbeta += column_sums(dy).transpose();
  const Matrix dxhat = dy.array().rowwise() * gamma.transpose().array();
  if (options.mode == Mode::inference) {
    return dxhat.array().rowwise() * inv_std.transpose().array();
  }
  const auto n = static_cast<double>(dy.rows());
  const Eigen::RowVectorXd sum_dxhat = column_sums(dxhat);
  const Eigen::RowVectorXd sum_dxhat_xhat = column_sums(dxhat.cwiseProduct(xhat));
  Matrix centered = (n * dxhat).rowwise() - sum_dxhat;
  centered -= (xhat.array().rowwise() * sum_dxhat_xhat.array()).matrix();
  return (centered.array().rowwise() * (inv_std.transpose().array() / n)).matrix();
}

LayerOptions layer_options(const GinConfig& c, Mode mode) {
  return {c.batch_norm, c.bn_eps, c.bn_momentum, mode};
}

}  // namespace

Matrix gin_layer_forward(const Matrix& h, const SparseMatrix& aggregate, const LayerParams& layer,
                         const LayerOptions& options, std::span<BatchNormStats> stats, LayerCache* cache) {
  if (h.rows() != aggregate.rows() || aggregate.rows() != aggregate.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("{} feature rows for a {}-node aggregation", h.rows(), aggregate.rows()));
  }
  if (h.cols() != layer.w1.rows()) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("layer expects width {}, got {}", layer.w1.rows(), h.cols()));
  }
  if (stats.size() < 2) throw Error(ErrorCode::ShapeMismatch, "a GIN layer needs two batch-norm slots");

  Matrix agg = (1.0 + layer.epsilon) * h;
  agg.noalias() += aggregate * h;

  Matrix z1 = agg * layer.w1;
  z1.rowwise() += layer.b1.transpose();
  Matrix xhat1;
  Vector inv_std1;
  Matrix r1 = batch_norm_forward(z1, layer.gamma1, layer.beta1, stats[0], options, &xhat1, &inv_std1)
                  .cwiseMax(0.0);

  Matrix z2 = r1 * layer.w2;
  z2.rowwise() += layer.b2.transpose();
  Matrix xhat2;
  Vector inv_std2;
  Matrix out = batch_norm_forward(z2, layer.gamma2, layer.beta2, stats[1], options, &xhat2, &inv_std2)
                   .cwiseMax(0.0);

  if (cache) {
    cache->input = h;
    cache->agg = std::move(agg);
    cache->xhat1 = std::move(xhat1);
    cache->inv_std1 = std::move(inv_std1);
    cache->r1 = std::move(r1);
    cache->xhat2 = std::move(xhat2);
    cache->inv_std2 = std::move(inv_std2);
    cache->output = out;
  }
  return out;
}

Matrix gin_layer_forward(const Matrix& h, const Graph& g, const LayerParams& layer, const LayerOptions& options,
                         std::span<BatchNormStats> stats) {
  Graph shell = g;
  shell.node_features.assign(static_cast<std::size_t>(g.num_nodes), {0.0});
  const PreparedGraph p = prepare(shell);
  SparseMatrix a(g.num_nodes, g.num_nodes);
  a.setFromTriplets(p.incoming.begin(), p.incoming.end());
  return gin_layer_forward(h, a, layer, options, stats);
}

Vector readout(std::span<const Matrix> per_layer_h, Readout mode) {
  if (per_layer_h.empty()) throw Error(ErrorCode::ShapeMismatch, "readout needs at least one layer");
  Eigen::Index width = 0;
  for (const Matrix& h : per_layer_h) {
    if (h.rows() == 0) throw Error(ErrorCode::EmptyGraph, "graph has no nodes");
    width += h.cols();
  }
  Vector out(width);
  Eigen::Index at = 0;
  for (const Matrix& h : per_layer_h) {
    Vector r = h.colwise().sum().transpose();
    if (mode == Readout::mean) r /= static_cast<double>(h.rows());
    out.segment(at, h.cols()) = r;
    at += h.cols();
  }
  return out;
}

Matrix forward(GinModel& model, const GraphBatch& batch, Mode mode, ForwardCache* cache) {
  const GinConfig& cfg = model.config();
  if (batch.x.cols() != cfg.input_dim) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("model expects {} input features, batch has {}", cfg.input_dim, batch.x.cols()));
  }
  const LayerOptions options = layer_options(cfg, mode);
  const Params& p = model.params();
  const int layers = model.gin_layers();
  if (cache) {
    cache->layers.assign(static_cast<std::size_t>(layers), {});
    cache->pooled.clear();
    cache->dropout_mask.clear();
  }

  const bool drop = mode == Mode::training && cfg.dropout > 0.0;
  std::bernoulli_distribution keep(1.0 - cfg.dropout);
  const double keep_scale = 1.0 / (1.0 - cfg.dropout);

  Matrix logits = Matrix::Zero(batch.size(), cfg.num_classes);
  Matrix h = batch.x;
  for (int k = 0; k <= layers; ++k) {
    if (k > 0) {
      auto stats = std::span<BatchNormStats>(model.running_stats()).subspan(static_cast<std::size_t>(2 * (k - 1)), 2);
      h = gin_layer_forward(h, batch.aggregate, p.layers[static_cast<std::size_t>(k - 1)], options, stats,
                            cache ? &cache->layers[static_cast<std::size_t>(k - 1)] : nullptr);
    }
    Matrix pooled = batch.pool * h;
    Matrix head = pooled * p.head_w[static_cast<std::size_t>(k)];
    head.rowwise() += p.head_b[static_cast<std::size_t>(k)].transpose();
    if (drop) {
      Matrix mask(head.rows(), head.cols());
      for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(model.rng()) ? keep_scale : 0.0;
      head.array() *= mask.array();
      if (cache) cache->dropout_mask.push_back(std::move(mask));
    }
    logits += head;
    if (cache) cache->pooled.push_back(std::move(pooled));
  }
  if (cache) cache->logits = logits;
  return logits;
}

Vector forward(GinModel& model, const Graph& g, Mode mode) {
  const PreparedGraph p = prepare(g);
  const GraphBatch b = make_batch(std::span<const PreparedGraph>(&p, 1), model.config().readout);
  return forward(model, b, mode).row(0).transpose();
}

// ---------------------------------------------------------------------------
// Loss and backward
// ---------------------------------------------------------------------------

namespace {

void check_labels(const Matrix& logits, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.rows()) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("{} labels for {} graphs", labels.size(), logits.rows()));
  }
  for (int y : labels) {
    if (y < 0 || y >= logits.cols()) {
      throw Error(ErrorCode::ShapeMismatch, fmt::format("label {} outside [0, {})", y, logits.cols()));
    }
  }
}

/// Row-wise softmax.
Matrix softmax(const Matrix& logits) {
  Matrix p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

}  // namespace

double cross_entropy(const Matrix& logits, std::span<const int> labels) {
  check_labels(logits, labels);
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    total += lse - logits(i, labels[static_cast<std::size_t>(i)]);
  }
  return total / static_cast<double>(logits.rows());
}

BackwardResult backward(GinModel& model, const GraphBatch& batch, Mode mode) {
  const GinConfig& cfg = model.config();
  ForwardCache cache;
  BackwardResult result;
  result.logits = forward(model, batch, mode, &cache);
  result.loss = cross_entropy(result.logits, batch.labels);

  const Params& p = model.params();
  Params& g = result.grads;
  g = p.zeros_like();

  const auto b = static_cast<double>(batch.size());
  Matrix dlogits = softmax(result.logits);
  for (Eigen::Index i = 0; i < dlogits.rows(); ++i) dlogits(i, batch.labels[static_cast<std::size_t>(i)]) -= 1.0;
  dlogits /= b;

  const int layers = model.gin_layers();
  std::vector<Matrix> dh(static_cast<std::size_t>(layers) + 1);
  for (int k = 0; k <= layers; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    Matrix dhead = dlogits;
    if (!cache.dropout_mask.empty()) dhead.array() *= cache.dropout_mask[ku].array();
    g.head_w[ku].noalias() = cache.pooled[ku].transpose() * dhead;
    g.head_b[ku] = dhead.colwise().sum().transpose();
    if (k > 0) {
      const Matrix dpooled = dhead * p.head_w[ku].transpose();
      dh[ku] = batch.pool.transpose() * dpooled;
    }
  }

  const LayerOptions options = layer_options(cfg, mode);
  for (int k = layers; k >= 1; --k) {
    const auto lu = static_cast<std::size_t>(k - 1);
    const LayerParams& L = p.layers[lu];
    LayerParams& G = g.layers[lu];
    const LayerCache& c = cache.layers[lu];

    Matrix dy2 = (c.output.array() > 0.0).select(dh[static_cast<std::size_t>(k)], 0.0);
    const Matrix dz2 = batch_norm_backward(dy2, L.gamma2, c.xhat2, c.inv_std2, options, G.gamma2, G.beta2);
    G.w2.noalias() = c.r1.transpose() * dz2;
    G.b2 = column_sums(dz2).transpose();

    Matrix dr1 = dz2 * L.w2.transpose();
    const Matrix dy1 = (c.r1.array() > 0.0).select(dr1, 0.0);
    const Matrix dz1 = batch_norm_backward(dy1, L.gamma1, c.xhat1, c.inv_std1, options, G.gamma1, G.beta1);
    G.w1.noalias() = c.agg.transpose() * dz1;
    G.b1 = column_sums(dz1).transpose();

    const Matrix dagg = dz1 * L.w1.transpose();
    G.epsilon = cfg.learn_epsilon ? (dagg.array() * c.input.array()).sum() : 0.0;
    if (k > 1) {
      Matrix& below = dh[static_cast<std::size_t>(k - 1)];
      below += (1.0 + L.epsilon) * dagg;
      below.noalias() += batch.aggregate.transpose() * dagg;
    }
  }
  return result;
}

BackwardResult backward(GinModel& model, std::span<const Graph> graphs, std::span<const int> labels, Mode mode) {
  if (graphs.empty()) throw Error(ErrorCode::EmptyCorpus, "batch is empty");
  if (graphs.size() != labels.size()) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("{} labels for {} graphs", labels.size(), graphs.size()));
  }
  std::vector<PreparedGraph> prepared;
  prepared.reserve(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    prepared.push_back(prepare(graphs[i]));
    prepared.back().label = labels[i];
  }
  return backward(model, make_batch(std::span<const PreparedGraph>(prepared), model.config().readout), mode);
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state, long t, double lr, const AdamOptions& options) {
  if (t < 1) throw Error(ErrorCode::InvalidConfig, "Adam step index starts at 1");
  if (params.size() != grads.size()) throw Error(ErrorCode::ShapeMismatch, "parameter and gradient lists differ");
  if (state.m.empty()) {
    for (auto p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) throw Error(ErrorCode::ShapeMismatch, "optimizer state does not match parameters");

  const double c1 = 1.0 - std::pow(options.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(options.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i];
    auto g = grads[i];
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (g.size() != p.size() || m.size() != p.size()) {
      throw Error(ErrorCode::ShapeMismatch, fmt::format("tensor {} has mismatched sizes", i));
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = options.beta1 * m[j] + (1.0 - options.beta1) * g[j];
      v[j] = options.beta2 * v[j] + (1.0 - options.beta2) * g[j] * g[j];
      p[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + options.eps);
    }
  }
  state.step = t;
}

}  // namespace ecggin::gin
