#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "batchlens/store.hpp"
#include "batchlens/timeseries.hpp"

namespace batchlens {

enum class Band { Idle, Low, Medium, High };

std::string_view to_string(Band band);

/// Idle [0,20), Low [20,40), Medium [40,80), High [80,100]. Values outside
/// [0,100] fall into the nearest end band; NaN is Idle.
Band classify_band(double value);

struct SpikeConfig {
  std::int64_t baseline_window_s = 1800;
  double min_rise_points = 25.0;
  double min_abs_level = 70.0;
};

struct SyncDropConfig {
  double machine_fraction = 0.8;
  double min_drop_points = 30.0;
  std::int64_t max_lag_steps = 2;
};

struct ThrashingConfig {
  double mem_floor = 85.0;
  double cpu_decline_points = 20.0;
  std::int64_t persist_steps_after_end = 2;
  std::int64_t min_duration_s = 600;
};

struct DetectorConfig {
  SpikeConfig spike;
  SyncDropConfig sync_drop;
  ThrashingConfig thrashing;

  /// Throws Error(InvalidConfig) on non-positive thresholds or a fraction
  /// outside (0, 1].
  void validate() const;
};

/// Spike needs this many pre-start samples to form a baseline.
inline constexpr std::size_t kMinBaselineSamples = 3;

struct AnomalyEvent {
  AnomalyKind kind = AnomalyKind::Spike;
  std::string job_id;
  std::vector<std::string> machine_ids;  // sorted, non-empty
  TimeWindow interval{0, 1};
  double severity = 0.0;  // [0, 1]
  std::map<std::string, std::map<std::string, double>> evidence;
};

struct Diagnostic {
  std::string job_id;
  std::string machine_id;  // empty for job-level diagnostics
  std::string message;
};

struct Detection {
  std::vector<AnomalyEvent> events;
  std::vector<Diagnostic> diagnostics;
};

struct JobBounds {
  std::string job_id;
  Timestamp start_ts = 0;
  Timestamp end_ts = 0;  // horizon end for unfinished jobs
};

/// Per machine: cpu and mem both above (pre-start median + min_rise_points)
/// and at least min_abs_level inside the job interval.
Detection detect_spikes(const SeriesBundle& cpu, const SeriesBundle& mem,
                        const JobBounds& bounds, std::int64_t resolution_s,
                        const DetectorConfig& cfg);

/// One event when enough of the job's machines lose min_drop_points of cpu
/// within max_lag_steps after the job starts.
Detection detect_sync_drop(const SeriesBundle& cpu, const JobBounds& bounds,
                           std::int64_t resolution_s, const DetectorConfig& cfg);

/// Per machine: mem pinned above mem_floor while cpu declines inside the job,
/// with the same signature still present after the job ended. Throws
/// Error(NotApplicable) for unfinished jobs and Error(NotFound) for unknown ones.
Detection detect_thrashing(const TraceStore& store, const std::string& job_id,
                           const DetectorConfig& cfg);

/// Runs all detectors over every job intersecting the window. Events are
/// sorted by (interval start, job id, kind).
Detection scan_window(const TraceStore& store, const TimeWindow& window,
                      const DetectorConfig& cfg);

}  // namespace batchlens
