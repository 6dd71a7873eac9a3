#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "ecggin/dataset.hpp"
#include "ecggin/error.hpp"
#include "ecggin/parallel.hpp"

namespace ecggin {

FoldReport cross_validate(const GraphCorpus& corpus, const gin::GinConfig& config, const gin::TrainConfig& tc,
                          const CrossValidationOptions& options) {
  if (corpus.graphs.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus has no graphs");
  validate(corpus);
  config.validate();
  tc.validate();
  if (static_cast<std::size_t>(config.input_dim) != corpus.feature_dim) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("model input width {} but corpus features have width {}",
                                                      config.input_dim, corpus.feature_dim));
  }
  if (config.num_classes < corpus.num_classes) {
    throw Error(ErrorCode::ShapeMismatch,
                fmt::format("model has {} classes, corpus uses {}", config.num_classes, corpus.num_classes));
  }

  std::vector<int> labels;
  labels.reserve(corpus.graphs.size());
  for (const Graph& g : corpus.graphs) labels.push_back(*g.label);
  const std::vector<Fold> folds = stratified_kfold(labels, options.folds, options.split_seed, options.groups);
  const std::vector<gin::PreparedGraph> data = gin::prepare(corpus);

  const auto k = folds.size();
  FoldReport report;
  report.fold_count = static_cast<int>(k);
  report.val_accuracy.resize(k);
  report.train_loss.resize(k);
  report.train_accuracy.resize(k);
  std::vector<std::vector<double>> lr(k);

  parallel_for(k, options.jobs, [&](std::size_t f) {
    const Fold& fold = folds[f];
    gin::GinModel model(config);
    auto& val = report.val_accuracy[f];
    const auto history = gin::train(model, data, fold.train, tc, [&](const gin::EpochMetrics&, gin::GinModel& m) {
      val.push_back(gin::accuracy(m, data, fold.validation));
    });
    for (const auto& m : history) {
      report.train_loss[f].push_back(m.train_loss);
      report.train_accuracy[f].push_back(m.train_accuracy);
      lr[f].push_back(m.lr);
    }
    if (options.on_fold_done) options.on_fold_done(static_cast<int>(f), model);
  });

  report.lr = lr.front();
  const int epochs = report.epochs();
  report.mean_val_accuracy.assign(static_cast<std::size_t>(epochs), 0.0);
  for (std::size_t e = 0; e < static_cast<std::size_t>(epochs); ++e) {
    double sum = 0.0;
    for (std::size_t f = 0; f < k; ++f) sum += report.val_accuracy[f][e];
    report.mean_val_accuracy[e] = sum / static_cast<double>(k);
  }
  const auto best = std::max_element(report.mean_val_accuracy.begin(), report.mean_val_accuracy.end());
  report.selected_epoch = static_cast<int>(best - report.mean_val_accuracy.begin());
  report.selected_accuracy = *best;
  return report;
}

void write_fold_report(const FoldReport& report, std::ostream& out) {
  std::string text = "epoch,lr,train_loss,train_acc,val_acc_mean";
  for (int f = 0; f < report.fold_count; ++f) fmt::format_to(std::back_inserter(text), ",val_acc_fold{}", f);
  text += '\n';
  const auto k = static_cast<double>(report.fold_count);
  for (std::size_t e = 0; e < report.lr.size(); ++e) {
    double loss = 0.0;
    double acc = 0.0;
    for (int f = 0; f < report.fold_count; ++f) {
      loss += report.train_loss[static_cast<std::size_t>(f)][e];
      acc += report.train_accuracy[static_cast<std::size_t>(f)][e];
    }
    fmt::format_to(std::back_inserter(text), "{},{:.6g},{:.6f},{:.6f},{:.6f}", e, report.lr[e], loss / k, acc / k,
                   report.mean_val_accuracy[e]);
    for (int f = 0; f < report.fold_count; ++f) {
      fmt::format_to(std::back_inserter(text), ",{:.6f}", report.val_accuracy[static_cast<std::size_t>(f)][e]);
    }
    text += '\n';
  }
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write of fold report failed");
}

SweepResult quantile_sweep(std::span<const Beat> beats, std::span<const int> q_values, const FeatureOptions& features,
                           const gin::GinConfig& config, const gin::TrainConfig& tc,
                           const CrossValidationOptions& options) {
  if (q_values.empty()) throw Error(ErrorCode::InvalidConfig, "quantile range is empty");
  SweepResult result;
  for (int q : q_values) {
    TransformOptions t;
    t.method = TransformMethod::qg;
    t.quantiles = q;
    t.features = features;
    t.jobs = options.jobs;
    const GraphCorpus corpus = transform_beats(beats, t);

    gin::GinConfig c = config;
    c.input_dim = static_cast<int>(corpus.feature_dim);
    c.num_classes = std::max(c.num_classes, corpus.num_classes);
    const FoldReport report = cross_validate(corpus, c, tc, options);
    result.rows.push_back({q, report.selected_accuracy, report.selected_epoch});
  }
  result.best_q = best_quantile(result.rows);
  return result;
}

int best_quantile(std::span<const SweepRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::InvalidConfig, "no sweep rows");
  const auto best = std::max_element(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.accuracy < b.accuracy || (a.accuracy == b.accuracy && a.q > b.q);
  });
  return best->q;
}

void write_sweep(const SweepResult& result, std::ostream& out) {
  std::string text = "q,accuracy,selected_epoch,best\n";
  for (const SweepRow& r : result.rows) {
    fmt::format_to(std::back_inserter(text), "{},{:.6f},{},{}\n", r.q, r.accuracy, r.selected_epoch,
                   r.q == result.best_q ? 1 : 0);
  }
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write of sweep table failed");
}

}  // namespace ecggin
