#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ecggin/series.hpp"

namespace ecggin::synthetic {

/// Shape of an ECG-like record: Gaussian P/QRS/T bumps repeated at a jittered
/// heart rate on top of baseline wander and white noise.
struct RecordShape {
  double sample_rate_hz = 125.0;
  double duration_s = 30.0;
  double heart_rate_bpm = 72.0;
  double rate_jitter = 0.03;    // relative R-R jitter
  double st_elevation = 0.0;    // offset between QRS and T (infarction-like when > 0)
  double t_amplitude = 0.3;     // negative values invert the T wave
  double q_depth = 0.1;
  double noise = 0.01;
  double wander = 0.05;
};

TimeSeries make_record(const RecordShape& shape, std::uint64_t seed);

inline RecordShape normal_shape() { return {}; }
inline RecordShape infarction_shape() {
  RecordShape s;
  s.st_elevation = 0.25;
  s.t_amplitude = -0.25;
  s.q_depth = 0.35;
  s.heart_rate_bpm = 84.0;
  return s;
}

/// Beats from a normal and an infarction-like record, labelled 0 and 1.
std::vector<Beat> make_beat_corpus(std::size_t per_class, std::uint64_t seed, std::size_t target_len = 187);

/// Evenly spaced triangular pulses of height 1 on a 0.2 baseline whose very
/// first sample is 0 (so every normalized sample after it is non-zero).
TimeSeries pulse_train(std::size_t length, std::size_t first_peak, std::size_t period, std::size_t pulses,
                       std::size_t half_width, double sample_rate_hz = 125.0);

}  // namespace ecggin::synthetic
