#include <algorithm>
#include <random>

#include "doctest.h"
#include "ecggin/error.hpp"
#include "ecggin/series.hpp"
#include "ecggin/synthetic.hpp"

using namespace ecggin;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ecggin::Error");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("normalize_window maps onto [0, 1]") {
  CHECK(normalize_window({{2, 4, 6}, 125}).values == std::vector<double>{0, 0.5, 1});
  CHECK(normalize_window({{0, 1}, 125}).values == std::vector<double>{0, 1});
  CHECK(code_of([] { normalize_window({{5, 5, 5}, 125}); }) == ErrorCode::ConstantSignal);
  CHECK(code_of([] { normalize_window({{}, 125}); }) == ErrorCode::EmptySeries);
}

TEST_CASE("normalize_window is idempotent") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> d(3.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    TimeSeries w{std::vector<double>(2 + trial % 50), 125};
    for (double& v : w.values) v = d(rng);
    const TimeSeries once = normalize_window(w);
    const TimeSeries twice = normalize_window(once);
    REQUIRE(once.size() == w.size());
    CHECK(*std::min_element(once.values.begin(), once.values.end()) == 0.0);
    CHECK(*std::max_element(once.values.begin(), once.values.end()) == 1.0);
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(std::abs(once.values[i] - twice.values[i]) <= 1e-12);
  }
}

TEST_CASE("local maxima report the first sample of a plateau") {
  CHECK(local_maxima(std::vector<double>{0, 1, 0}) == std::vector<std::size_t>{1});
  CHECK(local_maxima(std::vector<double>{0, 2, 2, 2, 1}) == std::vector<std::size_t>{1});
  CHECK(local_maxima(std::vector<double>{3, 2, 1}).empty());
  CHECK(local_maxima(std::vector<double>{0, 1, 1}).empty());  // plateau running off the end
  CHECK(local_maxima(std::vector<double>{1, 1, 2, 1, 3, 0}) == std::vector<std::size_t>{2, 4});
}

TEST_CASE("pulse train yields one beat per pulse with floor(1.2 P) leading samples") {
  // One 10 s window at 125 Hz, pulses every 150 samples starting at 100.
  const std::size_t period = 150;
  const TimeSeries rec = synthetic::pulse_train(1250, 100, period, 5, 10);
  const BeatExtraction out = extract_beats(rec);
  REQUIRE(out.beats.size() == 5);
  CHECK(out.windows_processed == 1);
  CHECK(out.skipped.empty());

  const std::size_t nonzero = 180;  // floor(1.2 * 150)
  const TimeSeries norm = normalize_window(rec);
  for (std::size_t b = 0; b < 5; ++b) {
    const Beat& beat = out.beats[b];
    REQUIRE(beat.samples.size() == 187);
    const std::size_t peak = 100 + b * period;
    for (std::size_t i = 0; i < nonzero; ++i) {
      CHECK(beat.samples[i] > 0.0);
      CHECK(beat.samples[i] == norm.values[peak + i]);
    }
    for (std::size_t i = nonzero; i < 187; ++i) CHECK(beat.samples[i] == 0.0);
    CHECK(beat.samples[0] == 1.0);
  }
}

TEST_CASE("two pulses give one R-R interval and two beats") {
  const TimeSeries rec = synthetic::pulse_train(1250, 300, 200, 2, 10);
  BeatExtractionOptions opt;
  opt.target_len = 300;
  const BeatExtraction out = extract_beats(rec, opt);
  REQUIRE(out.beats.size() == 2);
  for (const Beat& b : out.beats) {
    const auto last_nonzero = std::find_if(b.samples.rbegin(), b.samples.rend(), [](double v) { return v != 0.0; });
    CHECK(std::distance(last_nonzero, b.samples.rend()) == 240);  // floor(1.2 * 200)
  }
}

TEST_CASE("slices are clipped to the window and to target_len") {
  // Peak 60 samples before the window end: the slice keeps only those 60.
  const TimeSeries rec = synthetic::pulse_train(1250, 990, 200, 2, 10);
  const BeatExtraction out = extract_beats(rec);
  REQUIRE(out.beats.size() == 2);
  const Beat& tail = out.beats[1];
  CHECK(tail.samples[59] > 0.0);
  CHECK(std::all_of(tail.samples.begin() + 60, tail.samples.end(), [](double v) { return v == 0.0; }));
  // First beat: 240 samples requested, target_len 187 wins.
  CHECK(std::all_of(out.beats[0].samples.begin(), out.beats[0].samples.end(), [](double v) { return v > 0.0; }));
}

TEST_CASE("degenerate windows are skipped with diagnostics") {
  TimeSeries rec{std::vector<double>(2500, 0.0), 125};
  auto pulses = synthetic::pulse_train(1250, 100, 150, 5, 10);
  std::copy(pulses.values.begin(), pulses.values.end(), rec.values.begin() + 1250);

  const BeatExtraction out = extract_beats(rec);
  CHECK(out.windows_total == 2);
  CHECK(out.windows_processed == 2);
  REQUIRE(out.skipped.size() == 1);
  CHECK(out.skipped[0].window == 0);
  CHECK(out.skipped[0].reason == "constant-signal");
  CHECK(out.beats.size() == 5);

  const BeatExtraction zeros = extract_beats({std::vector<double>(1250, 0.0), 125});
  CHECK(zeros.beats.empty());
  CHECK(zeros.skipped.size() == 1);

  const BeatExtraction single = extract_beats(synthetic::pulse_train(1250, 400, 300, 1, 10));
  CHECK(single.beats.empty());
  REQUIRE(single.skipped.size() == 1);
  CHECK(single.skipped[0].reason == "no-peaks");
}

TEST_CASE("max_windows limits processing") {
  TimeSeries rec = synthetic::pulse_train(3750, 100, 150, 24, 10);
  BeatExtractionOptions opt;
  opt.max_windows = 1;
  const BeatExtraction out = extract_beats(rec, opt);
  CHECK(out.windows_total == 3);
  CHECK(out.windows_processed == 1);
}

TEST_CASE("records shorter than a window are rejected") {
  CHECK(code_of([] { extract_beats({std::vector<double>(100, 1.0), 125}); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("synthetic records produce valid beats for both classes") {
  const auto beats = synthetic::make_beat_corpus(40, 3);
  REQUIRE(beats.size() == 80);
  for (const Beat& b : beats) {
    REQUIRE(b.samples.size() == 187);
    CHECK(std::all_of(b.samples.begin(), b.samples.end(), [](double v) { return v >= 0.0 && v <= 1.0; }));
  }
  CHECK(std::count_if(beats.begin(), beats.end(), [](const Beat& b) { return b.label == 1; }) == 40);

  // Every retained candidate produces exactly one beat.
  const TimeSeries rec = synthetic::make_record(synthetic::normal_shape(), 11);
  const BeatExtraction out = extract_beats(rec);
  std::size_t expected = 0;
  for (std::size_t w = 0; w < out.windows_total; ++w) {
    const TimeSeries win{{rec.values.begin() + static_cast<long>(w * 1250), rec.values.begin() + static_cast<long>((w + 1) * 1250)}, 125};
    const TimeSeries norm = normalize_window(win);
    std::size_t peaks = 0;
    for (auto p : local_maxima(norm.values)) peaks += norm.values[p] > 0.9;
    if (peaks >= 2) expected += peaks;
  }
  CHECK(out.beats.size() == expected);
  CHECK(expected >= 30);  // ~72 bpm over 30 s
}
