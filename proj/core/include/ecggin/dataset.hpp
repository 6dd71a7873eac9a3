#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ecggin/gin.hpp"
#include "ecggin/series.hpp"
#include "ecggin/train.hpp"
#include "ecggin/transforms.hpp"

namespace ecggin {

// Beat CSV: `expected_len` amplitude columns then an integer label column,
// no header. Labels written as reals ("1.0e+00") are accepted when integral.
std::vector<Beat> load_beats(const std::string& path, std::size_t expected_len = 187);
std::vector<Beat> parse_beats(std::istream& in, std::size_t expected_len = 187, const std::string& source = "");
void write_beats(std::span<const Beat> beats, std::ostream& out);

// Raw record: one amplitude per line, blank lines ignored.
TimeSeries parse_record(std::istream& in, double sample_rate_hz);
TimeSeries load_record(const std::string& path, double sample_rate_hz);

/// Indices into `labels` after raising every class to the size of the
/// largest one: the input order first, then copies of each smaller class
/// cycling through its members in order. Throws Error(SingleClass).
std::vector<std::size_t> balance_indices(std::span<const int> labels);

struct BalancedBeats {
  std::vector<Beat> beats;
  std::vector<std::size_t> origin;  // index of the original beat for each output row
};

BalancedBeats balance_by_duplication(std::span<const Beat> beats);

/// Seeded subsample of `per_class` members from every class (original order
/// kept). Throws Error(TooFewSamples) when a class is smaller.
std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::size_t per_class,
                                              std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Seeded stratified k-fold split. When `groups` is non-empty, samples that
/// share a group id (copies of one original) always land in the same fold.
std::vector<Fold> stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed,
                                   std::span<const std::size_t> groups = {});

struct FoldReport {
  int fold_count = 0;
  std::vector<std::vector<double>> val_accuracy;    // [fold][epoch]
  std::vector<std::vector<double>> train_loss;      // [fold][epoch]
  std::vector<std::vector<double>> train_accuracy;  // [fold][epoch]
  std::vector<double> lr;                           // [epoch]
  std::vector<double> mean_val_accuracy;            // [epoch]
  int selected_epoch = 0;                           // argmax of the mean, earliest on ties
  double selected_accuracy = 0.0;

  int epochs() const noexcept { return static_cast<int>(lr.size()); }
};

struct CrossValidationOptions {
  int folds = 10;
  std::uint64_t split_seed = 0;
  std::span<const std::size_t> groups;  // optional, see stratified_kfold
  std::size_t jobs = 1;
  /// Called (from the worker that trained it) with each finished fold model.
  std::function<void(int fold, const gin::GinModel&)> on_fold_done;
};

/// Trains one model per fold from identical initial weights and reports the
/// epoch with the best mean validation accuracy.
FoldReport cross_validate(const GraphCorpus& corpus, const gin::GinConfig& config, const gin::TrainConfig& tc,
                          const CrossValidationOptions& options);

void write_fold_report(const FoldReport& report, std::ostream& out);

struct SweepRow {
  int q = 0;
  double accuracy = 0.0;
  int selected_epoch = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int best_q = 0;  // argmax accuracy, smaller q on ties
};

/// For each q builds the quantile-graph corpus of `beats` and cross-validates it.
SweepResult quantile_sweep(std::span<const Beat> beats, std::span<const int> q_values,
                           const FeatureOptions& features, const gin::GinConfig& config,
                           const gin::TrainConfig& tc, const CrossValidationOptions& options);

/// q with the highest accuracy; the smaller q wins a tie.
int best_quantile(std::span<const SweepRow> rows);

void write_sweep(const SweepResult& result, std::ostream& out);

}  // namespace ecggin
