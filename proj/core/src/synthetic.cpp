#include "ecggin/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ecggin/error.hpp"

namespace ecggin::synthetic {

namespace {

struct Wave {
  double offset_s;
  double amplitude;
  double width_s;
};

}  // namespace

TimeSeries make_record(const RecordShape& shape, std::uint64_t seed) {
  if (!(shape.sample_rate_hz > 0.0) || !(shape.duration_s > 0.0) || !(shape.heart_rate_bpm > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "synthetic record needs positive rate, duration and heart rate");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  const double fs = shape.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::floor(shape.duration_s * fs));
  TimeSeries out{std::vector<double>(n, 0.0), fs};

  const Wave waves[] = {
      {-0.20, 0.15, 0.025},                // P
      {-0.03, -shape.q_depth, 0.010},      // Q
      {0.00, 1.00, 0.012},                 // R
      {0.03, -0.20, 0.010},                // S
      {0.15, shape.st_elevation, 0.060},   // ST segment
      {0.30, shape.t_amplitude, 0.045},    // T
  };

  // R peaks sit on the sample grid so every beat reaches full height.
  const double mean_rr = 60.0 / shape.heart_rate_bpm;
  double t_peak = 0.5 * mean_rr;
  while (t_peak < shape.duration_s + 0.5) {
    const double snapped = std::round(t_peak * fs) / fs;
    for (const Wave& w : waves) {
      if (w.amplitude == 0.0) continue;
      const double centre = snapped + w.offset_s;
      const auto first = static_cast<long>(std::floor((centre - 4.0 * w.width_s) * fs));
      const auto last = static_cast<long>(std::ceil((centre + 4.0 * w.width_s) * fs));
      for (long i = std::max(0L, first); i <= last && i < static_cast<long>(n); ++i) {
        const double d = static_cast<double>(i) / fs - centre;
        out.values[static_cast<std::size_t>(i)] += w.amplitude * std::exp(-0.5 * d * d / (w.width_s * w.width_s));
      }
    }
    t_peak += mean_rr * (1.0 + shape.rate_jitter * gauss(rng));
  }

  const double wander_phase = phase(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    out.values[i] += shape.wander * std::sin(2.0 * std::numbers::pi * 0.25 * t + wander_phase);
    out.values[i] += shape.noise * gauss(rng);
  }
  return out;
}

std::vector<Beat> make_beat_corpus(std::size_t per_class, std::uint64_t seed, std::size_t target_len) {
  std::vector<Beat> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rate_scale(0.9, 1.1);
  for (int label = 0; label < 2; ++label) {
    std::size_t have = 0;
    for (int record = 0; have < per_class; ++record) {
      RecordShape shape = label == 0 ? normal_shape() : infarction_shape();
      shape.heart_rate_bpm *= rate_scale(rng);
      const TimeSeries rec = make_record(shape, rng());
      BeatExtractionOptions opt;
      opt.target_len = target_len;
      opt.label = label;
      opt.record_id = (label == 0 ? "normal" : "mi") + std::to_string(record);
      for (Beat& b : extract_beats(rec, opt).beats) {
        if (have == per_class) break;
        out.push_back(std::move(b));
        ++have;
      }
    }
  }
  return out;
}

TimeSeries pulse_train(std::size_t length, std::size_t first_peak, std::size_t period, std::size_t pulses,
                       std::size_t half_width, double sample_rate_hz) {
  if (half_width == 0) throw Error(ErrorCode::InvalidConfig, "pulse half width must be positive");
  TimeSeries out{std::vector<double>(length, 0.2), sample_rate_hz};
  for (std::size_t p = 0; p < pulses; ++p) {
    const std::size_t peak = first_peak + p * period;
    for (std::size_t d = 0; d < half_width; ++d) {
      const double h = 0.2 + 0.8 * (1.0 - static_cast<double>(d) / static_cast<double>(half_width));
      if (peak + d < length) out.values[peak + d] = std::max(out.values[peak + d], h);
      if (d <= peak && peak - d < length) out.values[peak - d] = std::max(out.values[peak - d], h);
    }
  }
  if (length > 0) out.values[0] = 0.0;
  return out;
}

}  // namespace ecggin::synthetic
