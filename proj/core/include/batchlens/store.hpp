#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "batchlens/time_window.hpp"
#include "batchlens/trace.hpp"

namespace batchlens {

struct JobSummary {
  std::string job_id;
  std::size_t task_count = 0;
  std::size_t instance_count = 0;
  Timestamp start_ts = 0;
  std::optional<Timestamp> end_ts;  // absent while any instance is unfinished
  std::vector<std::string> machine_set;  // sorted
};

struct DistributionStats {
  double fraction_single_task_jobs = 0.0;
  double fraction_multi_instance_tasks = 0.0;
  std::size_t machine_count = 0;
  std::size_t job_count = 0;
};

/// Utilization triple at one timestamp for one machine.
struct UsagePoint {
  Timestamp timestamp = 0;
  double cpu = 0.0;
  double mem = 0.0;
  double disk = 0.0;

  double value(Metric metric) const noexcept;
};

/// Result of a timestamp query; `out_of_range` is set (and the payload left
/// empty) when t lies outside the horizon.
template <typename T>
struct TimedQuery {
  T value{};
  bool out_of_range = false;
};

/// Immutable indexed view of a bundle. Every accessor is const and the
/// object is safe to share between threads once built.
class TraceStore {
 public:
  const Manifest& manifest() const noexcept { return manifest_; }
  TimeWindow horizon() const { return manifest_.horizon(); }
  std::int64_t usage_resolution() const noexcept { return manifest_.usage_resolution_s; }

  /// Sorted ids of every machine seen in usage or instance data.
  const std::vector<std::string>& machines() const noexcept { return machines_; }
  bool has_machine(const std::string& machine_id) const;

  const std::map<std::string, JobSummary>& jobs() const noexcept { return jobs_; }
  /// Throws Error(NotFound).
  const JobSummary& job(const std::string& job_id) const;
  bool has_job(const std::string& job_id) const { return jobs_.contains(job_id); }

  /// Tasks of a job sorted by task id. Throws Error(NotFound).
  std::span<const TaskRecord> tasks_of_job(const std::string& job_id) const;

  std::vector<const InstanceRecord*> instances_of_job(const std::string& job_id) const;
  std::vector<const InstanceRecord*> instances_of_task(const std::string& job_id,
                                                       const std::string& task_id) const;
  std::vector<const InstanceRecord*> instances_on_machine(const std::string& machine_id) const;
  std::span<const InstanceRecord> instances() const noexcept { return instances_; }

  /// Time-sorted usage of a machine; empty for machines without samples.
  /// Throws Error(NotFound) for unknown machines.
  std::span<const UsagePoint> usage(const std::string& machine_id) const;

  /// Latest sample with t - resolution < timestamp <= t, if any.
  std::optional<UsagePoint> sample_at(const std::string& machine_id, Timestamp t) const;

  /// Sorted machines running any instance of the job.
  const std::vector<std::string>& machines_of_job(const std::string& job_id) const;

  /// (start, end) per JobSummary. Throws Error(NotFound).
  std::pair<Timestamp, std::optional<Timestamp>> job_time_bounds(const std::string& job_id) const;

  TimedQuery<std::vector<std::string>> active_jobs_at(Timestamp t) const;
  TimedQuery<std::map<std::string, std::vector<std::string>>> multi_job_machines_at(Timestamp t) const;

  /// Throws Error(ZeroDenominator) when the store has no jobs.
  DistributionStats distribution_stats() const;

  /// Number of instances dropped at build time because their task is unknown.
  std::size_t orphan_instances() const noexcept { return orphans_; }

  /// Instances with start_ts <= t, in start order. Used by the timestamp queries.
  std::span<const std::size_t> started_by(Timestamp t) const;

 private:
  friend TraceStore build_store(const TraceBundle& bundle);
  TraceStore() = default;

  Manifest manifest_;
  std::vector<std::string> machines_;
  std::map<std::string, JobSummary> jobs_;
  std::map<std::string, std::vector<TaskRecord>> tasks_by_job_;
  std::vector<InstanceRecord> instances_;
  std::vector<std::size_t> by_start_;
  std::map<std::string, std::vector<std::size_t>> by_job_;
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> by_task_;
  std::map<std::string, std::vector<std::size_t>> by_machine_;
  std::map<std::string, std::vector<UsagePoint>> usage_;
  std::size_t orphans_ = 0;
};

/// Indexes a bundle. Instances whose (job, task) is missing from the task
/// table are dropped; more than half orphaned throws Error(CorruptBundle).
TraceStore build_store(const TraceBundle& bundle);

}  // namespace batchlens
