#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ecggin {

/// A univariate, uniformly sampled signal.
struct TimeSeries {
  std::vector<double> values;
  double sample_rate_hz = 125.0;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }
};

/// One fixed-length, zero-padded heartbeat with samples in [0, 1].
struct Beat {
  std::vector<double> samples;
  int label = 0;  // 0 = normal, 1 = abnormal
  std::string source_id;

  friend bool operator==(const Beat&, const Beat&) = default;
};

/// Throws Error(EmptySeries) on empty input, Error(RangeError) on NaN/Inf.
void require_finite(std::span<const double> values);

/// Min-max scaling onto [0, 1]. Throws Error(ConstantSignal) when the
/// window has zero range.
TimeSeries normalize_window(const TimeSeries& w);

/// Indices of local maxima, found from sign changes of the first
/// difference. A flat top reports its first sample. End points never
/// qualify.
std::vector<std::size_t> local_maxima(std::span<const double> values);

struct BeatExtractionOptions {
  double window_s = 10.0;
  double peak_threshold = 0.9;
  double beat_factor = 1.2;
  std::size_t target_len = 187;
  std::optional<std::size_t> max_windows;
  int label = 0;
  std::string record_id = "record";
};

struct WindowDiagnostic {
  std::size_t window = 0;
  std::size_t first_sample = 0;
  std::string reason;  // "constant-signal" or "no-peaks"
};

struct BeatExtraction {
  std::vector<Beat> beats;
  std::size_t windows_total = 0;
  std::size_t windows_processed = 0;
  std::vector<WindowDiagnostic> skipped;
};

/// Splits `record` into consecutive non-overlapping windows of
/// floor(window_s * rate) samples (a trailing partial window is dropped) and
/// emits one beat per R-peak candidate:
///   normalize -> local maxima -> keep those above `peak_threshold` ->
///   T = median R-R interval -> slice [peak, peak + floor(beat_factor * T))
///   clipped to the window -> truncate/zero-pad to `target_len`.
/// Windows that are constant or carry fewer than two candidates are skipped
/// and reported in `skipped`.
BeatExtraction extract_beats(const TimeSeries& record, const BeatExtractionOptions& options = {});

}  // namespace ecggin
