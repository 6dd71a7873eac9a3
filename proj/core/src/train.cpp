#include "ecggin/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include <fmt/format.h>

#include "ecggin/error.hpp"

namespace ecggin::gin {

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (!(lr0 > 0.0)) fail(fmt::format("lr0 must be positive, got {}", lr0));
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) fail(fmt::format("lr_decay must lie in (0, 1], got {}", lr_decay));
  if (lr_step_epochs < 1) fail(fmt::format("lr_step_epochs must be >= 1, got {}", lr_step_epochs));
  if (batch_size < 1) fail(fmt::format("batch_size must be >= 1, got {}", batch_size));
  if (epochs < 1) fail(fmt::format("epochs must be >= 1, got {}", epochs));
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0)) fail("Adam betas must lie in [0, 1)");
  if (!(adam.eps > 0.0)) fail("Adam eps must be positive");
}

double learning_rate(const TrainConfig& tc, int epoch) {
  return tc.lr0 * std::pow(tc.lr_decay, static_cast<double>(epoch / tc.lr_step_epochs));
}

std::vector<EpochMetrics> train(GinModel& model, std::span<const PreparedGraph> data,
                                std::span<const std::size_t> indices, const TrainConfig& tc,
                                const EpochCallback& on_epoch) {
  tc.validate();
  if (indices.empty()) throw Error(ErrorCode::EmptyCorpus, "no training graphs");
  for (std::size_t i : indices) {
    if (i >= data.size()) throw Error(ErrorCode::ShapeMismatch, fmt::format("training index {} out of range", i));
  }

  std::mt19937_64 shuffle_rng(tc.seed);
  std::vector<std::size_t> order(indices.begin(), indices.end());
  std::vector<const PreparedGraph*> members;
  std::vector<EpochMetrics> history;
  history.reserve(static_cast<std::size_t>(tc.epochs));
  const auto batch_size = static_cast<std::size_t>(tc.batch_size);
  AdamState& state = model.optimizer_state();

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    EpochMetrics m;
    m.epoch = epoch;
    m.lr = learning_rate(tc, epoch);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      members.clear();
      for (std::size_t i = start; i < end; ++i) members.push_back(&data[order[i]]);
      const GraphBatch batch = make_batch(std::span<const PreparedGraph* const>(members), model.config().readout);
      BackwardResult r = backward(model, batch, Mode::training);
      adam_step(model.params().tensors(), std::as_const(r.grads).tensors(), state, state.step + 1, m.lr, tc.adam);
      loss_sum += r.loss;
      ++batches;
    }
    m.train_loss = loss_sum / static_cast<double>(batches);
    m.train_accuracy = accuracy(model, data, indices);
    history.push_back(m);
    if (on_epoch) on_epoch(m, model);
  }
  return history;
}

std::vector<EpochMetrics> train(GinModel& model, const GraphCorpus& corpus, const TrainConfig& tc,
                                const EpochCallback& on_epoch) {
  if (corpus.graphs.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus has no graphs");
  validate(corpus);
  const std::vector<PreparedGraph> data = prepare(corpus);
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return train(model, data, all, tc, on_epoch);
}

std::vector<int> predict(GinModel& model, std::span<const PreparedGraph> data, std::span<const std::size_t> indices) {
  std::vector<std::size_t> all;
  if (indices.empty()) {
    all.resize(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    indices = all;
  }
  constexpr std::size_t kChunk = 256;
  std::vector<int> out;
  out.reserve(indices.size());
  std::vector<const PreparedGraph*> members;
  for (std::size_t start = 0; start < indices.size(); start += kChunk) {
    const std::size_t end = std::min(indices.size(), start + kChunk);
    members.clear();
    for (std::size_t i = start; i < end; ++i) members.push_back(&data[indices[i]]);
    const GraphBatch batch = make_batch(std::span<const PreparedGraph* const>(members), model.config().readout);
    const Matrix logits = forward(model, batch, Mode::inference);
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      Eigen::Index best = 0;
      logits.row(r).maxCoeff(&best);
      out.push_back(static_cast<int>(best));
    }
  }
  return out;
}

double accuracy(GinModel& model, std::span<const PreparedGraph> data, std::span<const std::size_t> indices) {
  if (data.empty()) return 0.0;
  const std::vector<int> pred = predict(model, data, indices);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const std::size_t idx = indices.empty() ? i : indices[i];
    if (pred[i] == data[idx].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace ecggin::gin
