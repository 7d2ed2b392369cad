#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "batchlens/time_window.hpp"

namespace batchlens {

enum class Metric { Cpu, Mem, Disk };

std::string_view to_string(Metric metric);
/// Accepts "cpu", "mem", "disk" (case-insensitive).
std::optional<Metric> parse_metric(std::string_view text);

enum class Status { Waiting, Running, Terminated, Failed, Cancelled };

std::string_view to_string(Status status);
/// Case-insensitive match against the five status names.
std::optional<Status> parse_status(std::string_view text);

/// One row of server_usage.csv. Utilizations are percentages in [0, 100].
struct MetricSample {
  Timestamp timestamp = 0;
  std::string machine_id;
  double cpu_util = 0.0;
  double mem_util = 0.0;
  double disk_util = 0.0;

  double value(Metric metric) const noexcept;

  friend bool operator==(const MetricSample&, const MetricSample&) = default;
};

struct TaskRecord {
  std::string job_id;
  std::string task_id;
  Timestamp create_ts = 0;
  std::optional<Timestamp> end_ts;  // absent: still running at the horizon
  std::int64_t instance_count = 1;
  Status status = Status::Running;
  std::vector<std::string> dependencies;

  friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
};

struct InstanceRecord {
  std::string job_id;
  std::string task_id;
  std::string machine_id;
  Timestamp start_ts = 0;
  std::optional<Timestamp> end_ts;
  Status status = Status::Running;

  /// Half-open activity test: start_ts <= t < end_ts (end absent = open).
  bool active_at(Timestamp t) const noexcept {
    return start_ts <= t && (!end_ts || *end_ts > t);
  }

  friend bool operator==(const InstanceRecord&, const InstanceRecord&) = default;
};

struct Manifest {
  Timestamp epoch_ts = 0;
  std::int64_t horizon_seconds = 0;
  std::int64_t usage_resolution_s = 1;
  std::int64_t scheduler_resolution_s = 300;
  std::size_t machine_count = 0;
  std::size_t job_count = 0;
  std::size_t task_count = 0;
  std::size_t instance_count = 0;
  int format_version = 1;

  TimeWindow horizon() const { return TimeWindow(0, horizon_seconds); }

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

struct Issue {
  std::string table;
  std::size_t row_number = 0;  // 1-based line number in the file; 0 = table-level
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;
  std::map<std::string, std::size_t> rows_accepted;
  std::map<std::string, std::size_t> rows_rejected;

  void reject(std::string_view table, std::size_t row, std::string_view code,
              std::string message);
  void warn(std::string_view table, std::size_t row, std::string_view code,
            std::string message);
  void accept(std::string_view table);
  void merge(const ValidationReport& other);

  std::size_t rows_read(const std::string& table) const;
  bool has_warning(std::string_view code) const;
  bool has_error(std::string_view code) const;

  /// Human-readable multi-line summary.
  std::string summary() const;
};

enum class AnomalyKind { Spike, SyncDrop, Thrashing };

std::string_view to_string(AnomalyKind kind);
std::optional<AnomalyKind> parse_anomaly_kind(std::string_view text);

/// Ground truth for one injected anomaly, as written to labels.json.
struct AnomalyLabel {
  std::string job_id;
  AnomalyKind kind = AnomalyKind::Spike;
  Timestamp t_start = 0;
  Timestamp t_end = 0;
  std::vector<std::string> machine_ids;

  friend bool operator==(const AnomalyLabel&, const AnomalyLabel&) = default;
};

/// A validated trace directory held in memory.
struct TraceBundle {
  std::string root_path;
  Manifest manifest;
  std::vector<MetricSample> usage;
  std::vector<TaskRecord> tasks;
  std::vector<InstanceRecord> instances;
  std::optional<std::vector<AnomalyLabel>> labels;
};

}  // namespace batchlens
