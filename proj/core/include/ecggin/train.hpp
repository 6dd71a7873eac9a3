#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ecggin/gin.hpp"

namespace ecggin::gin {

struct TrainConfig {
  double lr0 = 0.01;
  double lr_decay = 0.5;
  int lr_step_epochs = 50;
  int batch_size = 64;
  int epochs = 350;
  AdamOptions adam;
  std::uint64_t seed = 0;  // mini-batch shuffling

  void validate() const;
};

/// lr0 * lr_decay^floor(epoch / lr_step_epochs), epoch 0-based.
double learning_rate(const TrainConfig& tc, int epoch);

struct EpochMetrics {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;      // mean mini-batch loss over the epoch
  double train_accuracy = 0.0;  // inference-mode accuracy after the epoch
};

using EpochCallback = std::function<void(const EpochMetrics&, GinModel&)>;

/// Seeded mini-batch Adam training over `indices` of `data`.
std::vector<EpochMetrics> train(GinModel& model, std::span<const PreparedGraph> data,
                                std::span<const std::size_t> indices, const TrainConfig& tc,
                                const EpochCallback& on_epoch = {});
std::vector<EpochMetrics> train(GinModel& model, const GraphCorpus& corpus, const TrainConfig& tc,
                                const EpochCallback& on_epoch = {});

/// Inference-mode accuracy over `indices` (all graphs when empty).
double accuracy(GinModel& model, std::span<const PreparedGraph> data, std::span<const std::size_t> indices = {});
std::vector<int> predict(GinModel& model, std::span<const PreparedGraph> data, std::span<const std::size_t> indices = {});

inline constexpr const char* kCheckpointFormat = "ecggin-gin-checkpoint/1";

void save_checkpoint(const GinModel& model, const std::string& path);
GinModel load_checkpoint(const std::string& path);
std::string checkpoint_json(const GinModel& model);
GinModel checkpoint_from_json(const std::string& text);

}  // namespace ecggin::gin
