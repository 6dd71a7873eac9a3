#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ecggin/error.hpp"
#include "ecggin/train.hpp"

namespace ecggin::gin {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json config_json(const GinConfig& c) {
  ordered_json j;
  j["input_dim"] = c.input_dim;
  j["num_layers"] = c.num_layers;
  j["hidden_dim"] = c.hidden_dim;
  j["learn_epsilon"] = c.learn_epsilon;
  j["epsilon"] = c.epsilon;
  j["dropout"] = c.dropout;
  j["readout"] = c.readout == Readout::sum ? "sum" : "mean";
  j["num_classes"] = c.num_classes;
  j["batch_norm"] = c.batch_norm;
  j["bn_momentum"] = c.bn_momentum;
  j["bn_eps"] = c.bn_eps;
  j["seed"] = c.seed;
  return j;
}

GinConfig config_from(const ordered_json& j) {
  GinConfig c;
  c.input_dim = j.at("input_dim").get<int>();
  c.num_layers = j.at("num_layers").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.learn_epsilon = j.at("learn_epsilon").get<bool>();
  c.epsilon = j.at("epsilon").get<double>();
  c.dropout = j.at("dropout").get<double>();
  const auto readout = j.at("readout").get<std::string>();
  if (readout != "sum" && readout != "mean") throw Error(ErrorCode::ParseError, "unknown readout " + readout);
  c.readout = readout == "sum" ? Readout::sum : Readout::mean;
  c.num_classes = j.at("num_classes").get<int>();
  c.batch_norm = j.at("batch_norm").get<bool>();
  c.bn_momentum = j.at("bn_momentum").get<double>();
  c.bn_eps = j.at("bn_eps").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

void copy_into(const ordered_json& values, std::span<double> dst, const std::string& what) {
  const auto v = values.get<std::vector<double>>();
  if (v.size() != dst.size()) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("{} holds {} values, model expects {}", what, v.size(), dst.size()));
  }
  std::copy(v.begin(), v.end(), dst.begin());
}

}  // namespace

std::string checkpoint_json(const GinModel& model) {
  ordered_json j;
  j["format"] = kCheckpointFormat;
  j["config"] = config_json(model.config());

  ordered_json params;
  const auto names = model.params().tensor_names();
  const auto tensors = model.params().tensors();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    params[names[i]] = std::vector<double>(tensors[i].begin(), tensors[i].end());
  }
  j["params"] = std::move(params);

  ordered_json running = ordered_json::array();
  for (const auto& s : model.running_stats()) {
    running.push_back({{"mean", std::vector<double>(s.mean.begin(), s.mean.end())},
                       {"var", std::vector<double>(s.var.begin(), s.var.end())}});
  }
  j["running"] = std::move(running);

  const AdamState& a = model.optimizer_state();
  j["adam"] = {{"step", a.step}, {"m", a.m}, {"v", a.v}};

  std::ostringstream rng;
  rng << model.rng();
  j["rng"] = rng.str();
  return j.dump();
}

GinModel checkpoint_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, fmt::format("checkpoint is not valid JSON: {}", e.what()));
  }
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) {
      throw Error(ErrorCode::ParseError, fmt::format("unsupported checkpoint format '{}'", j.at("format").dump()));
    }
    GinModel model(config_from(j.at("config")));

    const auto names = model.params().tensor_names();
    auto tensors = model.params().tensors();
    const auto& params = j.at("params");
    for (std::size_t i = 0; i < tensors.size(); ++i) copy_into(params.at(names[i]), tensors[i], names[i]);

    const auto& running = j.at("running");
    auto& stats = model.running_stats();
    if (running.size() != stats.size()) throw Error(ErrorCode::ShapeMismatch, "batch-norm statistics count differs");
    for (std::size_t i = 0; i < stats.size(); ++i) {
      copy_into(running[i].at("mean"), std::span<double>(stats[i].mean.data(), static_cast<std::size_t>(stats[i].mean.size())), "running mean");
      copy_into(running[i].at("var"), std::span<double>(stats[i].var.data(), static_cast<std::size_t>(stats[i].var.size())), "running var");
    }

    AdamState& a = model.optimizer_state();
    a.step = j.at("adam").at("step").get<long>();
    a.m = j.at("adam").at("m").get<std::vector<std::vector<double>>>();
    a.v = j.at("adam").at("v").get<std::vector<std::vector<double>>>();
    if (a.m.size() != tensors.size() || a.v.size() != tensors.size()) {
      throw Error(ErrorCode::ShapeMismatch, "optimizer state does not match parameters");
    }

    std::istringstream rng(j.at("rng").get<std::string>());
    rng >> model.rng();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, fmt::format("malformed checkpoint: {}", e.what()));
  }
}

void save_checkpoint(const GinModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, fmt::format("cannot open {} for writing", path));
  out << checkpoint_json(model) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, fmt::format("write to {} failed", path));
}

GinModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open {}", path));
  std::ostringstream text;
  text << in.rdbuf();
  return checkpoint_from_json(text.str());
}

}  // namespace ecggin::gin
