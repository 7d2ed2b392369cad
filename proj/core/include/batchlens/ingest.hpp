#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "batchlens/error.hpp"
#include "batchlens/trace.hpp"

namespace batchlens {

inline constexpr std::string_view kUsageTable = "server_usage";
inline constexpr std::string_view kTaskTable = "batch_task";
inline constexpr std::string_view kInstanceTable = "batch_instance";

inline constexpr std::string_view kUsageHeader =
    "timestamp,machine_id,cpu_util,mem_util,disk_util";
inline constexpr std::string_view kTaskHeader =
    "create_ts,end_ts,job_id,task_id,instance_count,status";
inline constexpr std::string_view kInstanceHeader =
    "start_ts,end_ts,job_id,task_id,machine_id,status";

// Row-level issue codes.
namespace codes {
inline constexpr std::string_view kMissingField = "MISSING_FIELD";
inline constexpr std::string_view kFieldCount = "FIELD_COUNT";
inline constexpr std::string_view kBadNumber = "BAD_NUMBER";
inline constexpr std::string_view kBadValue = "BAD_VALUE";
inline constexpr std::string_view kNegativeTimestamp = "NEGATIVE_TIMESTAMP";
inline constexpr std::string_view kNegativeDuration = "NEGATIVE_DURATION";
inline constexpr std::string_view kDuplicateKey = "DUPLICATE_KEY";
inline constexpr std::string_view kClamped = "CLAMPED";
inline constexpr std::string_view kUnknownStatus = "UNKNOWN_STATUS";
inline constexpr std::string_view kUnparsableDependency = "UNPARSABLE_DEPENDENCY";
inline constexpr std::string_view kDanglingParent = "DANGLING_PARENT";
inline constexpr std::string_view kDanglingDependency = "DANGLING_DEPENDENCY";
inline constexpr std::string_view kManifestDrift = "MANIFEST_DRIFT";
}  // namespace codes

/// Thrown by load_bundle when the bundle cannot be used at all. Carries the
/// partial report gathered up to that point.
class IngestError : public Error {
 public:
  IngestError(ErrorCode code, const std::string& message, ValidationReport report)
      : Error(code, message), report_(std::move(report)) {}

  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  ValidationReport report;
};

// Parsers read a header line followed by one record per line. A wrong or
// missing header or a failing stream throws Error(BadHeader / Unreadable);
// anything wrong with an individual row lands in the report.
ParseResult<MetricSample> parse_server_usage(std::istream& in);
ParseResult<TaskRecord> parse_batch_tasks(std::istream& in);
ParseResult<InstanceRecord> parse_batch_instances(std::istream& in);

/// Dependencies encoded in a task id of the form task_<name>(_<dep>)*.
/// A purely numeric dep token borrows the letter prefix of <name>, so
/// "task_M2_1" depends on "task_M1". Returns nullopt when the id does not
/// follow the convention.
std::optional<std::vector<std::string>> parse_task_dependencies(std::string_view task_id);

struct LoadResult {
  TraceBundle bundle;
  ValidationReport report;
};

/// Reads the three tables (plus manifest.json and labels.json when present),
/// recomputes the manifest from the data and cross-checks the tables.
/// Throws IngestError for a missing or empty required table.
LoadResult load_bundle(const std::filesystem::path& root);

/// Recomputes the manifest for the given tables. `previous` supplies values
/// the data cannot determine (epoch, scheduler resolution).
Manifest compute_manifest(const std::vector<MetricSample>& usage,
                          const std::vector<TaskRecord>& tasks,
                          const std::vector<InstanceRecord>& instances,
                          const Manifest* previous = nullptr);

// Canonical CSV writers; output re-parses to identical records.
void write_server_usage(std::ostream& out, const std::vector<MetricSample>& rows);
void write_batch_tasks(std::ostream& out, const std::vector<TaskRecord>& rows);
void write_batch_instances(std::ostream& out, const std::vector<InstanceRecord>& rows);

std::string manifest_to_json(const Manifest& manifest);
/// Throws Error(InvalidConfig) on malformed JSON or wrong value types.
Manifest manifest_from_json(std::string_view text);

std::string labels_to_json(const std::vector<AnomalyLabel>& labels);
std::vector<AnomalyLabel> labels_from_json(std::string_view text);

/// Writes every table of the bundle plus manifest.json (and labels.json when
/// the bundle carries labels) into `dir`, creating it if needed.
void write_bundle(const TraceBundle& bundle, const std::filesystem::path& dir);
void write_manifest(const Manifest& manifest, const std::filesystem::path& dir);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace batchlens
