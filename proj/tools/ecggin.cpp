#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ecggin/dataset.hpp"
#include "ecggin/error.hpp"
#include "ecggin/gin.hpp"
#include "ecggin/graph.hpp"
#include "ecggin/parallel.hpp"
#include "ecggin/seed.hpp"
#include "ecggin/series.hpp"
#include "ecggin/train.hpp"
#include "ecggin/transforms.hpp"
#include "ecggin/version.hpp"

namespace fs = std::filesystem;
using ecggin::ErrorCode;
using json = nlohmann::ordered_json;

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kData = 3, kInternal = 4 };

/// Thrown by commands that have already decided the exit status.
struct CommandFailure {
  int code;
  std::string message;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoFailure:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidQ:
    case ErrorCode::ModeMismatch:
      return kUsage;
    default:
      return kData;
  }
}

const std::map<std::string, ecggin::TransformMethod> kMethods{
    {"nvg", ecggin::TransformMethod::nvg},
    {"nvg-naive", ecggin::TransformMethod::nvg_naive},
    {"hvg", ecggin::TransformMethod::hvg},
    {"qg", ecggin::TransformMethod::qg}};

const std::map<std::string, ecggin::FeatureMode> kFeatures{
    {"amplitude", ecggin::FeatureMode::amplitude},
    {"degree", ecggin::FeatureMode::degree},
    {"constant", ecggin::FeatureMode::constant}};

const std::map<std::string, ecggin::gin::Readout> kReadouts{
    {"sum", ecggin::gin::Readout::sum}, {"mean", ecggin::gin::Readout::mean}};

struct FeatureFlags {
  std::string mode = "amplitude";
  int degree_cap = 16;

  ecggin::FeatureOptions options() const { return {kFeatures.at(mode), degree_cap}; }
};

void add_feature_flags(CLI::App* cmd, FeatureFlags& f) {
  cmd->add_option("--features", f.mode, "Node features")
      ->check(CLI::IsMember(kFeatures))
      ->capture_default_str();
  cmd->add_option("--degree-cap", f.degree_cap, "Largest degree with its own one-hot slot")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
}

struct TrainFlags {
  int folds = 10;
  int layers = 5;
  int hidden = 64;
  int batch = 64;
  double dropout = 0.5;
  double lr = 0.01;
  double lr_decay = 0.5;
  int lr_step = 50;
  int epochs = 350;
  std::string readout = "sum";
  double epsilon = 0.0;
  bool fixed_epsilon = false;
  bool no_balance = false;
  bool paper_faithful = false;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

void add_train_flags(CLI::App* cmd, TrainFlags& t) {
  cmd->add_option("--folds", t.folds, "Cross-validation folds")->check(CLI::Range(2, 1000))->capture_default_str();
  cmd->add_option("--layers", t.layers, "GIN depth including the input layer")
      ->check(CLI::Range(2, 64))
      ->capture_default_str();
  cmd->add_option("--hidden", t.hidden, "Hidden width")->check(CLI::Range(1, 4096))->capture_default_str();
  cmd->add_option("--batch", t.batch, "Mini-batch size")->check(CLI::Range(1, 1 << 20))->capture_default_str();
  cmd->add_option("--dropout", t.dropout, "Dropout on the prediction heads")
      ->check(CLI::Range(0.0, 0.5))
      ->capture_default_str();
  cmd->add_option("--lr", t.lr, "Initial Adam learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--lr-decay", t.lr_decay, "Learning-rate multiplier per step")
      ->check(CLI::Range(1e-12, 1.0))
      ->capture_default_str();
  cmd->add_option("--lr-step", t.lr_step, "Epochs between learning-rate decays")
      ->check(CLI::Range(1, 1 << 20))
      ->capture_default_str();
  cmd->add_option("--epochs", t.epochs, "Training epochs per fold")->check(CLI::Range(1, 1 << 20))->capture_default_str();
  cmd->add_option("--readout", t.readout, "Graph readout")
      ->check(CLI::IsMember(kReadouts))
      ->capture_default_str();
  cmd->add_option("--epsilon", t.epsilon, "Initial GIN epsilon")->capture_default_str();
  cmd->add_flag("--fixed-epsilon", t.fixed_epsilon, "Keep epsilon constant instead of learning it");
  cmd->add_flag("--no-balance", t.no_balance, "Skip class balancing by duplication");
  cmd->add_flag("--paper-faithful", t.paper_faithful,
                "Balance before splitting without keeping copies of a beat in one fold");
  cmd->add_option("--seed", t.seed, "Seed for weights, splits and shuffling")->capture_default_str();
  cmd->add_option("--jobs", t.jobs, "Worker threads")->check(CLI::Range(std::size_t{1}, std::size_t{1024}))->capture_default_str();
}

ecggin::gin::GinConfig model_config(const TrainFlags& t, int input_dim, int num_classes) {
  ecggin::gin::GinConfig c;
  c.input_dim = input_dim;
  c.num_layers = t.layers;
  c.hidden_dim = t.hidden;
  c.dropout = t.dropout;
  c.readout = kReadouts.at(t.readout);
  c.epsilon = t.epsilon;
  c.learn_epsilon = !t.fixed_epsilon;
  c.num_classes = std::max(2, num_classes);
  c.seed = ecggin::derive_seed(t.seed, ecggin::SeedStream::model);
  return c;
}

ecggin::gin::TrainConfig train_config(const TrainFlags& t) {
  ecggin::gin::TrainConfig tc;
  tc.lr0 = t.lr;
  tc.lr_decay = t.lr_decay;
  tc.lr_step_epochs = t.lr_step;
  tc.batch_size = t.batch;
  tc.epochs = t.epochs;
  tc.seed = ecggin::derive_seed(t.seed, ecggin::SeedStream::shuffle);
  return tc;
}

/// Every option of `cmd` with its resolved value.
json resolved_options(const CLI::App* cmd) {
  json out = json::object();
  for (const CLI::Option* opt : cmd->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->get_expected_min() == 0) {
      out[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      const auto results = opt->results();
      out[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

struct Manifest {
  std::string command;
  json config;
  json inputs = json::object();
  json outputs = json::object();
  std::uint64_t seed = 0;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(const std::string& primary_output) const {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json m;
    m["command"] = command;
    m["config"] = config;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["seed"] = seed;
    m["version"] = ecggin::kVersion;
    m["duration_s"] = seconds;
    const std::string path = primary_output + ".manifest.json";
    std::ofstream out(path);
    out << m.dump(2) << '\n';
    if (!out) throw ecggin::Error(ErrorCode::IoFailure, fmt::format("cannot write {}", path));
  }
};

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
  std::ofstream out(path, mode);
  if (!out) throw ecggin::Error(ErrorCode::IoFailure, fmt::format("cannot write {}", path));
  return out;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw CommandFailure{kUsage, fmt::format("input file not found: {}", path)};
}

std::vector<int> beat_labels(const std::vector<ecggin::Beat>& beats) {
  std::vector<int> labels;
  labels.reserve(beats.size());
  for (const auto& b : beats) labels.push_back(b.label);
  return labels;
}

std::vector<ecggin::Beat> subsample(std::vector<ecggin::Beat> beats, std::size_t per_class, std::uint64_t seed) {
  if (per_class == 0) return beats;
  const auto labels = beat_labels(beats);
  const auto pick = ecggin::stratified_subsample(labels, per_class, ecggin::derive_seed(seed, ecggin::SeedStream::subsample));
  std::vector<ecggin::Beat> out;
  out.reserve(pick.size());
  for (auto i : pick) out.push_back(std::move(beats[i]));
  return out;
}

// ---------------------------------------------------------------- beats

struct BeatsArgs {
  std::string input;
  std::string output;
  double sample_rate = 125.0;
  ecggin::BeatExtractionOptions extraction;
  std::size_t max_windows = 0;
  std::string record_id;
  bool append = false;
};

int run_beats(const BeatsArgs& a, const CLI::App* cmd) {
  Manifest manifest{"beats", resolved_options(cmd)};
  require_file(a.input);

  ecggin::TimeSeries record;
  try {
    record = ecggin::load_record(a.input, a.sample_rate);
  } catch (const ecggin::RowError& e) {
    throw CommandFailure{kUsage, fmt::format("{}: {}", a.input, e.what())};
  }

  ecggin::BeatExtractionOptions opt = a.extraction;
  if (a.max_windows > 0) opt.max_windows = a.max_windows;
  opt.record_id = a.record_id.empty() ? fs::path(a.input).stem().string() : a.record_id;
  const ecggin::BeatExtraction result = ecggin::extract_beats(record, opt);

  for (const auto& d : result.skipped) {
    fmt::print(stderr, "window {} (sample {}): skipped, {}\n", d.window, d.first_sample, d.reason);
  }
  auto out = open_output(a.output, a.append ? std::ios::app : std::ios::out);
  ecggin::write_beats(result.beats, out);
  out.close();
  if (!out) throw ecggin::Error(ErrorCode::IoFailure, fmt::format("cannot write {}", a.output));

  fmt::print("{} beats from {} of {} windows ({} skipped)\n", result.beats.size(), result.windows_processed,
             result.windows_total, result.skipped.size());
  manifest.inputs["record"] = a.input;
  manifest.outputs["beats"] = a.output;
  manifest.write(a.output);
  return kOk;
}

// ------------------------------------------------------------ transform

struct TransformArgs {
  std::string input;
  std::string output;
  std::string method = "nvg";
  int quantiles = 24;
  FeatureFlags features;
  std::size_t target_len = 187;
  std::size_t per_class = 0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

int run_transform(const TransformArgs& a, const CLI::App* cmd) {
  Manifest manifest{"transform", resolved_options(cmd)};
  manifest.seed = a.seed;
  require_file(a.input);

  auto beats = subsample(ecggin::load_beats(a.input, a.target_len), a.per_class, a.seed);
  ecggin::TransformOptions t;
  t.method = kMethods.at(a.method);
  t.quantiles = a.quantiles;
  t.features = a.features.options();
  t.jobs = a.jobs;
  const ecggin::GraphCorpus corpus = ecggin::transform_beats(beats, t);

  auto out = open_output(a.output);
  ecggin::serialize_corpus(corpus, out);
  out.close();
  if (!out) throw ecggin::Error(ErrorCode::IoFailure, fmt::format("cannot write {}", a.output));

  fmt::print("{} graphs, feature width {}\n", corpus.graphs.size(), corpus.feature_dim);
  manifest.inputs["beats"] = a.input;
  manifest.outputs["corpus"] = a.output;
  manifest.write(a.output);
  return kOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string input;
  std::string report;
  std::string checkpoint_dir;
  TrainFlags flags;
};

struct Balanced {
  ecggin::GraphCorpus corpus;
  std::vector<std::size_t> groups;
};

Balanced balance_corpus(const ecggin::GraphCorpus& corpus, const TrainFlags& flags) {
  Balanced b;
  if (flags.no_balance) {
    b.corpus = corpus;
    return b;
  }
  std::vector<int> labels;
  for (const auto& g : corpus.graphs) labels.push_back(*g.label);
  const auto idx = ecggin::balance_indices(labels);
  std::vector<ecggin::Graph> graphs;
  graphs.reserve(idx.size());
  for (auto i : idx) graphs.push_back(corpus.graphs[i]);
  b.corpus = ecggin::make_corpus(std::move(graphs));
  if (!flags.paper_faithful) b.groups = idx;
  return b;
}

int run_train(const TrainArgs& a, const CLI::App* cmd) {
  Manifest manifest{"train", resolved_options(cmd)};
  manifest.seed = a.flags.seed;
  require_file(a.input);

  const ecggin::GraphCorpus raw = ecggin::read_corpus(a.input);
  if (raw.graphs.empty()) throw ecggin::Error(ErrorCode::EmptyCorpus, fmt::format("{} holds no graphs", a.input));
  for (std::size_t i = 0; i < raw.graphs.size(); ++i) {
    if (!raw.graphs[i].label) throw ecggin::RowError(ErrorCode::ParseError, i + 1, "graph has no label");
  }
  const Balanced data = balance_corpus(raw, a.flags);

  const auto config = model_config(a.flags, static_cast<int>(data.corpus.feature_dim), data.corpus.num_classes);
  const auto tc = train_config(a.flags);
  const std::string ckpt_dir = a.checkpoint_dir.empty() ? a.report + ".checkpoints" : a.checkpoint_dir;
  std::error_code ec;
  fs::create_directories(ckpt_dir, ec);
  if (ec) throw ecggin::Error(ErrorCode::IoFailure, fmt::format("cannot create {}", ckpt_dir));

  ecggin::CrossValidationOptions cv;
  cv.folds = a.flags.folds;
  cv.split_seed = ecggin::derive_seed(a.flags.seed, ecggin::SeedStream::split);
  cv.groups = data.groups;
  cv.jobs = a.flags.jobs;
  std::vector<std::string> checkpoints(static_cast<std::size_t>(a.flags.folds));
  cv.on_fold_done = [&](int fold, const ecggin::gin::GinModel& model) {
    const std::string path = (fs::path(ckpt_dir) / fmt::format("fold{:02}.json", fold)).string();
    ecggin::gin::save_checkpoint(model, path);
    checkpoints[static_cast<std::size_t>(fold)] = path;
    fmt::print(stderr, "fold {} done\n", fold);
  };
  const ecggin::FoldReport report = ecggin::cross_validate(data.corpus, config, tc, cv);

  auto out = open_output(a.report);
  ecggin::write_fold_report(report, out);
  out.close();
  if (!out) throw ecggin::Error(ErrorCode::IoFailure, fmt::format("cannot write {}", a.report));

  fmt::print("graphs {} (after balancing), folds {}, selected epoch {}, accuracy {:.4f}\n", data.corpus.graphs.size(),
             report.fold_count, report.selected_epoch, report.selected_accuracy);
  manifest.inputs["corpus"] = a.input;
  manifest.outputs["report"] = a.report;
  manifest.outputs["checkpoints"] = checkpoints;
  manifest.outputs["selected_epoch"] = report.selected_epoch;
  manifest.outputs["selected_accuracy"] = report.selected_accuracy;
  manifest.write(a.report);
  return kOk;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string checkpoint;
  std::string input;
  std::string output;
};

int run_evaluate(const EvaluateArgs& a, const CLI::App* cmd) {
  Manifest manifest{"evaluate", resolved_options(cmd)};
  require_file(a.checkpoint);
  require_file(a.input);

  ecggin::gin::GinModel model = ecggin::gin::load_checkpoint(a.checkpoint);
  const ecggin::GraphCorpus corpus = ecggin::read_corpus(a.input);
  if (corpus.graphs.empty()) throw ecggin::Error(ErrorCode::EmptyCorpus, fmt::format("{} holds no graphs", a.input));
  if (static_cast<int>(corpus.feature_dim) != model.config().input_dim) {
    throw ecggin::Error(ErrorCode::ShapeMismatch, fmt::format("corpus feature width {} but the model expects {}",
                                                              corpus.feature_dim, model.config().input_dim));
  }
  const auto prepared = ecggin::gin::prepare(corpus);
  const auto predicted = ecggin::gin::predict(model, prepared);
  std::size_t labelled = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    if (prepared[i].label < 0) continue;
    ++labelled;
    correct += predicted[i] == prepared[i].label ? 1 : 0;
  }
  const double acc = labelled ? static_cast<double>(correct) / static_cast<double>(labelled) : 0.0;
  fmt::print("accuracy {:.6f} ({}/{})\n", acc, correct, labelled);

  if (!a.output.empty()) {
    auto out = open_output(a.output);
    out << "index,predicted,label\n";
    for (std::size_t i = 0; i < prepared.size(); ++i) out << i << ',' << predicted[i] << ',' << prepared[i].label << '\n';
    out.close();
    if (!out) throw ecggin::Error(ErrorCode::IoFailure, fmt::format("cannot write {}", a.output));
    manifest.inputs["checkpoint"] = a.checkpoint;
    manifest.inputs["corpus"] = a.input;
    manifest.outputs["predictions"] = a.output;
    manifest.outputs["accuracy"] = acc;
    manifest.write(a.output);
  }
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string input;
  std::string output;
  int qmin = 2;
  int qmax = 30;
  FeatureFlags features;
  std::size_t target_len = 187;
  std::size_t per_class = 0;
  TrainFlags flags;
};

int run_sweep(const SweepArgs& a, const CLI::App* cmd) {
  Manifest manifest{"sweep-quantiles", resolved_options(cmd)};
  manifest.seed = a.flags.seed;
  if (a.qmin > a.qmax) throw CommandFailure{kUsage, "--qmin must not exceed --qmax"};
  require_file(a.input);

  auto beats = subsample(ecggin::load_beats(a.input, a.target_len), a.per_class, a.flags.seed);
  std::vector<std::size_t> groups;
  if (!a.flags.no_balance) {
    ecggin::BalancedBeats b = ecggin::balance_by_duplication(beats);
    beats = std::move(b.beats);
    if (!a.flags.paper_faithful) groups = std::move(b.origin);
  }
  std::vector<int> qs;
  for (int q = a.qmin; q <= a.qmax; ++q) qs.push_back(q);

  ecggin::CrossValidationOptions cv;
  cv.folds = a.flags.folds;
  cv.split_seed = ecggin::derive_seed(a.flags.seed, ecggin::SeedStream::split);
  cv.groups = groups;
  cv.jobs = a.flags.jobs;
  const ecggin::SweepResult result =
      ecggin::quantile_sweep(beats, qs, a.features.options(), model_config(a.flags, 1, 2), train_config(a.flags), cv);

  auto out = open_output(a.output);
  ecggin::write_sweep(result, out);
  out.close();
  if (!out) throw ecggin::Error(ErrorCode::IoFailure, fmt::format("cannot write {}", a.output));
  for (const auto& r : result.rows) fmt::print("q={} accuracy={:.4f}\n", r.q, r.accuracy);
  fmt::print("best q {}\n", result.best_q);

  manifest.inputs["beats"] = a.input;
  manifest.outputs["sweep"] = a.output;
  manifest.outputs["best_q"] = result.best_q;
  manifest.write(a.output);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  ecggin::tune_allocator();
  CLI::App app{"ECG beat classification with visibility and quantile graphs and a graph isomorphism network"};
  app.set_version_flag("--version", ecggin::kVersion);
  app.require_subcommand(1);

  BeatsArgs beats;
  auto* beats_cmd = app.add_subcommand("beats", "Cut a raw record into fixed-length beats (CSV)");
  beats_cmd->add_option("--input", beats.input, "Raw record, one amplitude per line")->required();
  beats_cmd->add_option("--output", beats.output, "Beat CSV to write")->required();
  beats_cmd->add_option("--sample-rate", beats.sample_rate, "Sampling rate in Hz")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  beats_cmd->add_option("--window", beats.extraction.window_s, "Window length in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  beats_cmd->add_option("--peak-threshold", beats.extraction.peak_threshold, "R-peak threshold on the normalized window")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  beats_cmd->add_option("--beat-factor", beats.extraction.beat_factor, "Beat length as a multiple of the median RR")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  beats_cmd->add_option("--target-len", beats.extraction.target_len, "Samples per beat after padding")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20))
      ->capture_default_str();
  beats_cmd->add_option("--max-windows", beats.max_windows, "Process at most this many windows (0 = all)")
      ->capture_default_str();
  beats_cmd->add_option("--label", beats.extraction.label, "Class label for every beat (0 normal, 1 abnormal)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  beats_cmd->add_option("--record-id", beats.record_id, "Record name used in beat ids (default: input file stem)");
  beats_cmd->add_flag("--append", beats.append, "Append to the output instead of replacing it");

  TransformArgs transform;
  auto* transform_cmd = app.add_subcommand("transform", "Map beats to graphs (JSON lines)");
  transform_cmd->add_option("--input", transform.input, "Beat CSV")->required();
  transform_cmd->add_option("--output", transform.output, "Graph corpus to write")->required();
  transform_cmd->add_option("--method", transform.method, "Series-to-graph mapping")
      ->check(CLI::IsMember(kMethods))
      ->capture_default_str();
  transform_cmd->add_option("--quantiles", transform.quantiles, "Quantile count for qg")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  add_feature_flags(transform_cmd, transform.features);
  transform_cmd->add_option("--target-len", transform.target_len, "Samples per beat row")->capture_default_str();
  transform_cmd->add_option("--per-class", transform.per_class, "Seeded subsample of this many beats per class (0 = all)")
      ->capture_default_str();
  transform_cmd->add_option("--seed", transform.seed, "Seed for subsampling")->capture_default_str();
  transform_cmd->add_option("--jobs", transform.jobs, "Worker threads")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1024}))
      ->capture_default_str();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Ten-fold cross-validated GIN training");
  train_cmd->add_option("--input", train.input, "Labelled graph corpus")->required();
  train_cmd->add_option("--report", train.report, "Per-epoch fold report CSV")->required();
  train_cmd->add_option("--checkpoint-dir", train.checkpoint_dir, "Per-fold checkpoints (default: <report>.checkpoints)");
  add_train_flags(train_cmd, train.flags);

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Accuracy of a checkpoint on a graph corpus");
  evaluate_cmd->add_option("--checkpoint", evaluate.checkpoint, "Checkpoint written by train")->required();
  evaluate_cmd->add_option("--input", evaluate.input, "Graph corpus")->required();
  evaluate_cmd->add_option("--output", evaluate.output, "Optional per-graph predictions CSV");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep-quantiles", "Cross-validated accuracy of quantile graphs for a range of q");
  sweep_cmd->add_option("--input", sweep.input, "Beat CSV")->required();
  sweep_cmd->add_option("--output", sweep.output, "Sweep table CSV")->required();
  sweep_cmd->add_option("--qmin", sweep.qmin, "Smallest q")->check(CLI::Range(1, 100000))->capture_default_str();
  sweep_cmd->add_option("--qmax", sweep.qmax, "Largest q")->check(CLI::Range(1, 100000))->capture_default_str();
  add_feature_flags(sweep_cmd, sweep.features);
  sweep_cmd->add_option("--target-len", sweep.target_len, "Samples per beat row")->capture_default_str();
  sweep_cmd->add_option("--per-class", sweep.per_class, "Seeded subsample of this many beats per class (0 = all)")
      ->capture_default_str();
  add_train_flags(sweep_cmd, sweep.flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*beats_cmd) return run_beats(beats, beats_cmd);
    if (*transform_cmd) return run_transform(transform, transform_cmd);
    if (*train_cmd) return run_train(train, train_cmd);
    if (*evaluate_cmd) return run_evaluate(evaluate, evaluate_cmd);
    if (*sweep_cmd) return run_sweep(sweep, sweep_cmd);
  } catch (const CommandFailure& f) {
    fmt::print(stderr, "error: {}\n", f.message);
    return f.code;
  } catch (const ecggin::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kInternal;
  }
  return kUsage;
}
