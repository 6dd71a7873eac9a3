#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ecggin/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

void write_record(const ecggin::TimeSeries& r, const fs::path& path) {
  std::ofstream out(path);
  for (double v : r.values) out << fmt::format("{:.6f}\n", v);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fmt::print("{} ({} samples)\n", path.string(), r.values.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic raw-record fixtures"};
  std::string out_dir = "data/fixtures";
  double seconds = 60.0;
  std::uint64_t seed = 1;
  app.add_option("--out-dir", out_dir, "Destination directory")->capture_default_str();
  app.add_option("--seconds", seconds, "Record length")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", seed, "Noise seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    auto normal = ecggin::synthetic::normal_shape();
    normal.duration_s = seconds;
    auto mi = ecggin::synthetic::infarction_shape();
    mi.duration_s = seconds;
    write_record(ecggin::synthetic::make_record(normal, seed), fs::path(out_dir) / "normal_record.txt");
    write_record(ecggin::synthetic::make_record(mi, seed + 1), fs::path(out_dir) / "mi_record.txt");
    // 10 s at 125 Hz, five pulses 150 samples apart starting at 100.
    write_record(ecggin::synthetic::pulse_train(1250, 100, 150, 5, 10), fs::path(out_dir) / "pulse_train.txt");
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
