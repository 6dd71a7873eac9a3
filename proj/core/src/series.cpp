#include "ecggin/series.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ecggin/error.hpp"

namespace ecggin {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConstantSignal: return "ConstantSignal";
    case ErrorCode::NoPeaks: return "NoPeaks";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::InvalidQ: return "InvalidQ";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::InvalidPermutation: return "InvalidPermutation";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

void require_finite(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptySeries, "series has no samples");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::RangeError, fmt::format("sample {} is not finite", i));
    }
  }
}

TimeSeries normalize_window(const TimeSeries& w) {
  require_finite(w.values);
  const auto [lo, hi] = std::minmax_element(w.values.begin(), w.values.end());
  const double min = *lo;
  const double range = *hi - min;
  if (!(range > 0.0)) throw Error(ErrorCode::ConstantSignal, "window has zero amplitude range");

  TimeSeries out{std::vector<double>(w.size()), w.sample_rate_hz};
  std::transform(w.values.begin(), w.values.end(), out.values.begin(),
                 [&](double v) { return (v - min) / range; });
  // Pin the extremes so the output spans [0, 1] exactly despite rounding.
  out.values[static_cast<std::size_t>(lo - w.values.begin())] = 0.0;
  out.values[static_cast<std::size_t>(hi - w.values.begin())] = 1.0;
  return out;
}

std::vector<std::size_t> local_maxima(std::span<const double> values) {
  std::vector<std::size_t> peaks;
  const std::size_t n = values.size();
  if (n < 3) return peaks;

  // `candidate` is the last sample reached by a rise; a flat run after it
  // leaves it unchanged, so a plateau reports its first sample.
  std::size_t candidate = 0;
  bool rising = false;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = values[i] - values[i - 1];
    if (d > 0.0) {
      rising = true;
      candidate = i;
    } else if (d < 0.0) {
      if (rising) peaks.push_back(candidate);
      rising = false;
    }
  }
  return peaks;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

BeatExtraction extract_beats(const TimeSeries& record, const BeatExtractionOptions& options) {
  if (!(record.sample_rate_hz > 0.0)) throw Error(ErrorCode::InvalidConfig, "sample rate must be positive");
  if (!(options.window_s > 0.0)) throw Error(ErrorCode::InvalidConfig, "window length must be positive");
  if (options.target_len == 0) throw Error(ErrorCode::InvalidConfig, "target length must be positive");
  require_finite(record.values);

  const auto window_len = static_cast<std::size_t>(std::floor(options.window_s * record.sample_rate_hz));
  if (window_len < 3 || record.size() < window_len) {
    throw Error(ErrorCode::SeriesTooShort,
                fmt::format("record has {} samples, one window needs {}", record.size(), window_len));
  }

  BeatExtraction result;
  result.windows_total = record.size() / window_len;
  std::size_t windows = result.windows_total;
  if (options.max_windows) windows = std::min(windows, *options.max_windows);

  for (std::size_t w = 0; w < windows; ++w) {
    const std::size_t first = w * window_len;
    TimeSeries window{std::vector<double>(record.values.begin() + static_cast<std::ptrdiff_t>(first),
                                          record.values.begin() + static_cast<std::ptrdiff_t>(first + window_len)),
                      record.sample_rate_hz};
    ++result.windows_processed;

    TimeSeries norm;
    try {
      norm = normalize_window(window);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConstantSignal) throw;
      result.skipped.push_back({w, first, "constant-signal"});
      continue;
    }

    std::vector<std::size_t> peaks;
    for (std::size_t p : local_maxima(norm.values)) {
      if (norm.values[p] > options.peak_threshold) peaks.push_back(p);
    }
    if (peaks.size() < 2) {
      result.skipped.push_back({w, first, "no-peaks"});
      continue;
    }

    std::vector<double> rr;
    rr.reserve(peaks.size() - 1);
    for (std::size_t i = 1; i < peaks.size(); ++i) rr.push_back(static_cast<double>(peaks[i] - peaks[i - 1]));
    const double period = median(std::move(rr));
    const auto span_len = static_cast<std::size_t>(std::floor(options.beat_factor * period));

    for (std::size_t p : peaks) {
      const std::size_t end = std::min({p + span_len, window_len, p + options.target_len});
      Beat beat;
      beat.samples.assign(options.target_len, 0.0);
      std::copy(norm.values.begin() + static_cast<std::ptrdiff_t>(p),
                norm.values.begin() + static_cast<std::ptrdiff_t>(end), beat.samples.begin());
      beat.label = options.label;
      beat.source_id = fmt::format("{}:{}:{}", options.record_id, w, first + p);
      result.beats.push_back(std::move(beat));
    }
  }
  return result;
}

}  // namespace ecggin
