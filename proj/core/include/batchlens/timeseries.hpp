#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "batchlens/store.hpp"

namespace batchlens {

struct SeriesPoint {
  Timestamp timestamp = 0;
  double value = 0.0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct Series {
  std::string machine_id;
  Metric metric = Metric::Cpu;
  std::vector<SeriesPoint> points;  // strictly increasing timestamps

  friend bool operator==(const Series&, const Series&) = default;
};

enum class AnnotationKind { Start, End };

std::string_view to_string(AnnotationKind kind);

struct Annotation {
  AnnotationKind kind = AnnotationKind::Start;
  Timestamp timestamp = 0;
  std::string task_id;
  std::string machine_id;

  friend auto operator<=>(const Annotation&, const Annotation&) = default;
};

struct SeriesBundle {
  std::string job_id;
  Metric metric = Metric::Cpu;
  std::vector<Series> series;           // one per machine, sorted by machine id
  std::vector<Annotation> annotations;  // sorted, no duplicates
  std::map<std::string, std::size_t> task_color_index;

  friend bool operator==(const SeriesBundle&, const SeriesBundle&) = default;
};

struct AggregatePoint {
  Timestamp timestamp = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t samples = 0;
};

struct AggregateSeries {
  Metric metric = Metric::Cpu;
  std::int64_t resolution_s = 0;
  std::vector<AggregatePoint> points;
};

/// Samples with window.t_from <= t < window.t_to. Throws Error(NotFound).
Series machine_series(const TraceStore& store, const std::string& machine_id,
                      Metric metric, const TimeWindow& window);

/// One series per machine of the job plus start/end annotations whose
/// timestamps fall inside the window. Throws Error(NotFound).
SeriesBundle job_series_bundle(const TraceStore& store, const std::string& job_id,
                               Metric metric, const TimeWindow& window);

/// Mean/min/max over all machines per resolution step (steps start at
/// multiples of resolution_s). Empty steps are omitted. Throws
/// Error(InvalidArgument) when resolution_s is below the usage resolution.
AggregateSeries cluster_timeline(const TraceStore& store, Metric metric,
                                 std::int64_t resolution_s);

/// Largest-triangle-three-buckets decimation to exactly `target_points`
/// (identity when the series is already that short). Throws
/// Error(InvalidArgument) when target_points < 2.
Series downsample(const Series& series, std::size_t target_points);

/// Restricts series points and annotations to the window; task colors are kept.
SeriesBundle brush_slice(const SeriesBundle& bundle, const TimeWindow& window);

}  // namespace batchlens
