#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ecggin/error.hpp"
#include "ecggin/graph.hpp"

namespace ecggin {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json to_json(const Graph& g) {
  ordered_json j;
  j["n"] = g.num_nodes;
  j["directed"] = g.directed;
  ordered_json edges = ordered_json::array();
  for (const Edge& e : g.edges) edges.push_back(ordered_json::array({e.u, e.v, e.w}));
  j["edges"] = std::move(edges);
  ordered_json x = ordered_json::array();
  for (const auto& row : g.node_features) x.push_back(row);
  j["x"] = std::move(x);
  j["y"] = g.label ? ordered_json(*g.label) : ordered_json(nullptr);
  return j;
}

Graph from_json(const ordered_json& j) {
  Graph g;
  g.num_nodes = j.at("n").get<int>();
  g.directed = j.at("directed").get<bool>();
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3) throw Error(ErrorCode::ParseError, "edge must be [u, v, w]");
    g.edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
  }
  for (const auto& row : j.at("x")) g.node_features.push_back(row.get<std::vector<double>>());
  if (const auto& y = j.at("y"); !y.is_null()) g.label = y.get<int>();
  return g;
}

}  // namespace

void serialize_corpus(const GraphCorpus& c, std::ostream& sink) {
  for (const Graph& g : c.graphs) {
    sink << to_json(g).dump() << '\n';
    if (!sink) throw Error(ErrorCode::IoFailure, "write to corpus sink failed");
  }
  sink.flush();
  if (!sink) throw Error(ErrorCode::IoFailure, "flush of corpus sink failed");
}

GraphCorpus deserialize_corpus(std::istream& source) {
  std::vector<Graph> graphs;
  std::string line;
  std::size_t row = 0;
  while (std::getline(source, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      graphs.push_back(from_json(ordered_json::parse(line)));
      validate(graphs.back());
    } catch (const nlohmann::json::exception& e) {
      throw RowError(ErrorCode::ParseError, row, e.what());
    } catch (const RowError&) {
      throw;
    } catch (const Error& e) {
      throw RowError(e.code(), row, e.what());
    }
  }
  if (source.bad()) throw Error(ErrorCode::IoFailure, "read from corpus source failed");
  GraphCorpus c = make_corpus(std::move(graphs));
  validate(c);
  return c;
}

void write_corpus(const GraphCorpus& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, fmt::format("cannot open {} for writing", path));
  serialize_corpus(c, out);
}

GraphCorpus read_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, fmt::format("cannot open {}", path));
  return deserialize_corpus(in);
}

}  // namespace ecggin
