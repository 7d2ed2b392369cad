#include "batchlens/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json_util.hpp"
#include "text_util.hpp"

namespace batchlens {

namespace fs = std::filesystem;
using detail::Json;
using detail::parse_double;
using detail::parse_int;

namespace {

// Walks a CSV stream: validates the header, then hands each data line with
// its 1-based line number to `on_row`.
template <typename OnRow>
void for_each_row(std::istream& in, std::string_view header, std::string_view table,
                  OnRow&& on_row) {
  if (!in.good() && !in.eof()) {
    throw Error(ErrorCode::Unreadable, std::string(table) + ": stream is not readable");
  }
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!saw_header) {
      if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
      }
      if (detail::trim(line) != header) {
        throw Error(ErrorCode::BadHeader, std::string(table) + ": expected header '" +
                                              std::string(header) + "', got '" + line + "'");
      }
      saw_header = true;
      continue;
    }
    on_row(std::string_view(line), line_no);
  }
  if (in.bad()) {
    throw Error(ErrorCode::Unreadable, std::string(table) + ": read failed at line " +
                                           std::to_string(line_no + 1));
  }
}

// Per-row field access that records the first problem it meets.
class RowReader {
 public:
  RowReader(std::string_view table, std::size_t line_no, std::vector<std::string_view> fields,
            ValidationReport& report)
      : table_(table), line_(line_no), fields_(std::move(fields)), report_(report) {}

  bool check_count(std::size_t expected) {
    if (fields_.size() == expected) return true;
    return fail(codes::kFieldCount, "expected " + std::to_string(expected) + " fields, got " +
                                        std::to_string(fields_.size()));
  }

  std::optional<std::string> text(std::size_t i, std::string_view name) {
    if (failed_) return std::nullopt;
    if (fields_[i].empty()) {
      fail(codes::kMissingField, std::string(name) + " is empty");
      return std::nullopt;
    }
    return std::string(fields_[i]);
  }

  std::optional<Timestamp> timestamp(std::size_t i, std::string_view name) {
    if (failed_) return std::nullopt;
    if (fields_[i].empty()) {
      fail(codes::kMissingField, std::string(name) + " is empty");
      return std::nullopt;
    }
    return checked_timestamp(i, name);
  }

  // Empty field = absent. Outer nullopt = failure.
  std::optional<std::optional<Timestamp>> optional_timestamp(std::size_t i,
                                                             std::string_view name) {
    if (failed_) return std::nullopt;
    if (fields_[i].empty()) return std::optional<Timestamp>{};
    auto v = checked_timestamp(i, name);
    if (!v) return std::nullopt;
    return std::optional<Timestamp>{*v};
  }

  std::optional<double> utilization(std::size_t i, std::string_view name) {
    if (failed_) return std::nullopt;
    if (fields_[i].empty()) {
      fail(codes::kMissingField, std::string(name) + " is empty");
      return std::nullopt;
    }
    auto v = parse_double(fields_[i]);
    if (!v) {
      fail(codes::kBadNumber, std::string(name) + " '" + std::string(fields_[i]) +
                                  "' is not a finite number");
      return std::nullopt;
    }
    if (*v < 0.0 || *v > 100.0) {
      const double clamped = std::clamp(*v, 0.0, 100.0);
      pending_warnings_.push_back(std::string(name) + " " + std::string(fields_[i]) +
                                  " clamped to " + format_double(clamped));
      return clamped;
    }
    return v;
  }

  std::optional<Status> status(std::size_t i) {
    if (failed_) return std::nullopt;
    if (fields_[i].empty()) {
      fail(codes::kMissingField, "status is empty");
      return std::nullopt;
    }
    if (auto s = parse_status(fields_[i])) return s;
    report_.warn(table_, line_, codes::kUnknownStatus,
                 "unknown status '" + std::string(fields_[i]) + "', treated as Running");
    return Status::Running;
  }

  bool fail(std::string_view code, std::string message) {
    if (!failed_) report_.reject(table_, line_, code, std::move(message));
    failed_ = true;
    return false;
  }

  bool failed() const noexcept { return failed_; }

  // Clamp warnings only matter for rows that end up accepted.
  void accept() {
    for (auto& w : pending_warnings_) report_.warn(table_, line_, codes::kClamped, std::move(w));
    report_.accept(table_);
  }

  std::size_t line() const noexcept { return line_; }

 private:
  std::optional<Timestamp> checked_timestamp(std::size_t i, std::string_view name) {
    auto v = parse_int(fields_[i]);
    if (!v) {
      fail(codes::kBadNumber, std::string(name) + " '" + std::string(fields_[i]) +
                                  "' is not an integer");
      return std::nullopt;
    }
    if (*v < 0) {
      fail(codes::kNegativeTimestamp, std::string(name) + " is negative");
      return std::nullopt;
    }
    return v;
  }

  std::string_view table_;
  std::size_t line_;
  std::vector<std::string_view> fields_;
  ValidationReport& report_;
  std::vector<std::string> pending_warnings_;
  bool failed_ = false;
};

bool is_alnum_token(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
  });
}

bool is_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

// "M12" -> "12"; empty when the name has no trailing number.
std::string_view numeric_part(std::string_view name) {
  std::size_t i = name.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(name[i - 1]))) --i;
  return name.substr(i);
}

std::string_view task_name(std::string_view task_id) {
  constexpr std::string_view prefix = "task_";
  if (task_id.substr(0, prefix.size()) != prefix) return {};
  auto rest = task_id.substr(prefix.size());
  return rest.substr(0, rest.find('_'));
}

void write_ts(std::ostream& out, const std::optional<Timestamp>& ts) {
  if (ts) out << *ts;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Unreadable, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Record, typename Parser>
ParseResult<Record> parse_file(const fs::path& path, Parser parser) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Unreadable, "cannot open " + path.string());
  return parser(in);
}

void compare_manifest(const Manifest& stated, const Manifest& actual, ValidationReport& report) {
  auto check = [&](std::string_view key, auto a, auto b) {
    if (a != b) {
      report.warn("manifest", 0, codes::kManifestDrift,
                  std::string(key) + ": manifest says " + std::to_string(a) + ", data has " +
                      std::to_string(b));
    }
  };
  check("horizon_seconds", stated.horizon_seconds, actual.horizon_seconds);
  check("usage_resolution_s", stated.usage_resolution_s, actual.usage_resolution_s);
  check("machine_count", stated.machine_count, actual.machine_count);
  check("job_count", stated.job_count, actual.job_count);
  check("task_count", stated.task_count, actual.task_count);
  check("instance_count", stated.instance_count, actual.instance_count);
  check("format_version", stated.format_version, actual.format_version);
}

// Dependencies written with a bare number ("task_R3_1") are rewritten to the
// unique task of the same job carrying that number when the letter guess
// from parse_task_dependencies misses.
void resolve_dependencies(std::vector<TaskRecord>& tasks, ValidationReport& report) {
  std::map<std::string, std::set<std::string>> ids_by_job;
  for (const auto& t : tasks) ids_by_job[t.job_id].insert(t.task_id);
  for (auto& t : tasks) {
    const auto& ids = ids_by_job[t.job_id];
    for (auto& dep : t.dependencies) {
      if (ids.contains(dep)) continue;
      const auto wanted = numeric_part(task_name(dep));
      std::vector<std::string> candidates;
      if (!wanted.empty()) {
        for (const auto& id : ids) {
          if (id != t.task_id && numeric_part(task_name(id)) == wanted) candidates.push_back(id);
        }
      }
      if (candidates.size() == 1) {
        dep = candidates.front();
      } else {
        report.warn(kTaskTable, 0, codes::kDanglingDependency,
                    t.job_id + "/" + t.task_id + " depends on unknown task " + dep);
      }
    }
  }
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf.data(), ptr);
}

std::optional<std::vector<std::string>> parse_task_dependencies(std::string_view task_id) {
  constexpr std::string_view prefix = "task_";
  if (task_id.substr(0, prefix.size()) != prefix) return std::nullopt;
  const auto tokens = detail::split(task_id.substr(prefix.size()), '_');
  if (tokens.empty() || tokens.front().empty()) return std::nullopt;
  const auto name = tokens.front();
  std::size_t letters = 0;
  while (letters < name.size() && std::isalpha(static_cast<unsigned char>(name[letters]))) {
    ++letters;
  }
  std::vector<std::string> deps;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (!is_alnum_token(tokens[i])) return std::nullopt;
    if (is_digits(tokens[i])) {
      deps.push_back(std::string(prefix) + std::string(name.substr(0, letters)) +
                     std::string(tokens[i]));
    } else {
      deps.push_back(std::string(prefix) + std::string(tokens[i]));
    }
  }
  return deps;
}

ParseResult<MetricSample> parse_server_usage(std::istream& in) {
  ParseResult<MetricSample> result;
  auto& report = result.report;
  report.rows_accepted.try_emplace(std::string(kUsageTable), 0);
  report.rows_rejected.try_emplace(std::string(kUsageTable), 0);
  std::set<std::pair<std::string, Timestamp>> seen;
  for_each_row(in, kUsageHeader, kUsageTable, [&](std::string_view line, std::size_t no) {
    RowReader row(kUsageTable, no, detail::split(line, ','), report);
    if (!row.check_count(5)) return;
    MetricSample s;
    auto ts = row.timestamp(0, "timestamp");
    auto machine = row.text(1, "machine_id");
    auto cpu = row.utilization(2, "cpu_util");
    auto mem = row.utilization(3, "mem_util");
    auto disk = row.utilization(4, "disk_util");
    if (row.failed()) return;
    if (!seen.emplace(*machine, *ts).second) {
      row.fail(codes::kDuplicateKey,
               "duplicate sample for " + *machine + " at " + std::to_string(*ts));
      return;
    }
    s.timestamp = *ts;
    s.machine_id = std::move(*machine);
    s.cpu_util = *cpu;
    s.mem_util = *mem;
    s.disk_util = *disk;
    row.accept();
    result.records.push_back(std::move(s));
  });
  return result;
}

ParseResult<TaskRecord> parse_batch_tasks(std::istream& in) {
  ParseResult<TaskRecord> result;
  auto& report = result.report;
  report.rows_accepted.try_emplace(std::string(kTaskTable), 0);
  report.rows_rejected.try_emplace(std::string(kTaskTable), 0);
  std::set<std::pair<std::string, std::string>> seen;
  for_each_row(in, kTaskHeader, kTaskTable, [&](std::string_view line, std::size_t no) {
    RowReader row(kTaskTable, no, detail::split(line, ','), report);
    if (!row.check_count(6)) return;
    auto create = row.timestamp(0, "create_ts");
    auto end = row.optional_timestamp(1, "end_ts");
    auto job = row.text(2, "job_id");
    auto task = row.text(3, "task_id");
    auto count_text = row.text(4, "instance_count");
    if (row.failed()) return;
    auto count = parse_int(*count_text);
    if (!count) {
      row.fail(codes::kBadNumber, "instance_count '" + *count_text + "' is not an integer");
      return;
    }
    if (*count < 1) {
      row.fail(codes::kBadValue, "instance_count must be at least 1");
      return;
    }
    if (*end && **end < *create) {
      row.fail(codes::kNegativeDuration, "end_ts precedes create_ts");
      return;
    }
    if (seen.contains({*job, *task})) {
      row.fail(codes::kDuplicateKey, "duplicate task " + *job + "/" + *task);
      return;
    }
    auto status = row.status(5);
    if (row.failed()) return;
    seen.emplace(*job, *task);
    TaskRecord t;
    t.job_id = std::move(*job);
    t.task_id = std::move(*task);
    t.create_ts = *create;
    t.end_ts = *end;
    t.instance_count = *count;
    t.status = *status;
    if (auto deps = parse_task_dependencies(t.task_id)) {
      t.dependencies = std::move(*deps);
    } else {
      report.warn(kTaskTable, no, codes::kUnparsableDependency,
                  "task id '" + t.task_id + "' does not encode dependencies");
    }
    row.accept();
    result.records.push_back(std::move(t));
  });
  return result;
}

ParseResult<InstanceRecord> parse_batch_instances(std::istream& in) {
  ParseResult<InstanceRecord> result;
  auto& report = result.report;
  report.rows_accepted.try_emplace(std::string(kInstanceTable), 0);
  report.rows_rejected.try_emplace(std::string(kInstanceTable), 0);
  for_each_row(in, kInstanceHeader, kInstanceTable, [&](std::string_view line, std::size_t no) {
    RowReader row(kInstanceTable, no, detail::split(line, ','), report);
    if (!row.check_count(6)) return;
    auto start = row.timestamp(0, "start_ts");
    auto end = row.optional_timestamp(1, "end_ts");
    auto job = row.text(2, "job_id");
    auto task = row.text(3, "task_id");
    auto machine = row.text(4, "machine_id");
    if (row.failed()) return;
    if (*end && **end < *start) {
      row.fail(codes::kNegativeDuration, "end_ts precedes start_ts");
      return;
    }
    auto status = row.status(5);
    if (row.failed()) return;
    InstanceRecord r;
    r.job_id = std::move(*job);
    r.task_id = std::move(*task);
    r.machine_id = std::move(*machine);
    r.start_ts = *start;
    r.end_ts = *end;
    r.status = *status;
    row.accept();
    result.records.push_back(std::move(r));
  });
  return result;
}

Manifest compute_manifest(const std::vector<MetricSample>& usage,
                          const std::vector<TaskRecord>& tasks,
                          const std::vector<InstanceRecord>& instances,
                          const Manifest* previous) {
  Manifest m;
  if (previous) {
    m.epoch_ts = previous->epoch_ts;
    m.scheduler_resolution_s = previous->scheduler_resolution_s;
    m.usage_resolution_s = previous->usage_resolution_s;
  }

  // Usage resolution: most frequent positive gap between consecutive samples
  // of the same machine (smallest gap wins ties).
  std::map<std::string, std::vector<Timestamp>> times;
  for (const auto& s : usage) times[s.machine_id].push_back(s.timestamp);
  std::map<Timestamp, std::size_t> gaps;
  for (auto& [_, ts] : times) {
    std::sort(ts.begin(), ts.end());
    for (std::size_t i = 1; i < ts.size(); ++i) {
      if (ts[i] > ts[i - 1]) ++gaps[ts[i] - ts[i - 1]];
    }
  }
  if (!gaps.empty()) {
    m.usage_resolution_s =
        std::max_element(gaps.begin(), gaps.end(), [](const auto& a, const auto& b) {
          return a.second < b.second;
        })->first;
  }

  Timestamp horizon = 0;
  for (const auto& s : usage) horizon = std::max(horizon, s.timestamp + m.usage_resolution_s);
  for (const auto& t : tasks) {
    horizon = std::max(horizon, t.create_ts + 1);
    if (t.end_ts) horizon = std::max(horizon, *t.end_ts);
  }
  for (const auto& i : instances) {
    horizon = std::max(horizon, i.start_ts + 1);
    if (i.end_ts) horizon = std::max(horizon, *i.end_ts);
  }
  m.horizon_seconds = horizon;

  std::set<std::string> machines;
  for (const auto& s : usage) machines.insert(s.machine_id);
  for (const auto& i : instances) machines.insert(i.machine_id);
  std::set<std::string> jobs;
  for (const auto& t : tasks) jobs.insert(t.job_id);
  m.machine_count = machines.size();
  m.job_count = jobs.size();
  m.task_count = tasks.size();
  m.instance_count = instances.size();
  return m;
}

LoadResult load_bundle(const fs::path& root) {
  ValidationReport report;
  const auto usage_path = root / "server_usage.csv";
  const auto task_path = root / "batch_task.csv";
  const auto instance_path = root / "batch_instance.csv";
  for (const auto& p : {usage_path, task_path, instance_path}) {
    if (!fs::is_regular_file(p)) {
      report.reject(p.stem().string(), 0, to_string(ErrorCode::MissingTable),
                    "missing " + p.filename().string());
      throw IngestError(ErrorCode::MissingTable, "missing required table " + p.string(), report);
    }
  }

  // The three parsers share nothing; merge happens below on this thread.
  auto usage_f = std::async(std::launch::async, [&] {
    return parse_file<MetricSample>(usage_path, [](std::istream& in) { return parse_server_usage(in); });
  });
  auto task_f = std::async(std::launch::async, [&] {
    return parse_file<TaskRecord>(task_path, [](std::istream& in) { return parse_batch_tasks(in); });
  });
  auto instance_f = std::async(std::launch::async, [&] {
    return parse_file<InstanceRecord>(instance_path,
                                      [](std::istream& in) { return parse_batch_instances(in); });
  });

  LoadResult result;
  auto& bundle = result.bundle;
  bundle.root_path = root.string();
  try {
    auto usage = usage_f.get();
    auto tasks = task_f.get();
    auto instances = instance_f.get();
    report.merge(usage.report);
    report.merge(tasks.report);
    report.merge(instances.report);
    bundle.usage = std::move(usage.records);
    bundle.tasks = std::move(tasks.records);
    bundle.instances = std::move(instances.records);
  } catch (const Error& e) {
    report.reject("bundle", 0, to_string(e.code()), e.what());
    throw IngestError(e.code(), e.what(), report);
  }

  if (bundle.usage.empty()) {
    throw IngestError(ErrorCode::EmptyTable, "server_usage.csv has no usable rows", report);
  }
  if (bundle.tasks.empty()) {
    throw IngestError(ErrorCode::EmptyTable, "batch_task.csv has no usable rows", report);
  }

  std::set<std::pair<std::string, std::string>> task_keys;
  for (const auto& t : bundle.tasks) task_keys.emplace(t.job_id, t.task_id);
  for (const auto& inst : bundle.instances) {
    if (!task_keys.contains({inst.job_id, inst.task_id})) {
      report.warn(kInstanceTable, 0, codes::kDanglingParent,
                  "instance on " + inst.machine_id + " references unknown task " + inst.job_id +
                      "/" + inst.task_id);
    }
  }
  resolve_dependencies(bundle.tasks, report);

  std::optional<Manifest> stated;
  if (const auto path = root / "manifest.json"; fs::is_regular_file(path)) {
    try {
      stated = manifest_from_json(read_file(path));
    } catch (const Error& e) {
      report.warn("manifest", 0, codes::kManifestDrift,
                  std::string("manifest.json ignored: ") + e.what());
    }
  }
  bundle.manifest =
      compute_manifest(bundle.usage, bundle.tasks, bundle.instances, stated ? &*stated : nullptr);
  if (stated) compare_manifest(*stated, bundle.manifest, report);

  if (const auto path = root / "labels.json"; fs::is_regular_file(path)) {
    try {
      bundle.labels = labels_from_json(read_file(path));
    } catch (const Error& e) {
      report.warn("labels", 0, "INVALID_LABELS", std::string("labels.json ignored: ") + e.what());
    }
  }
  result.report = std::move(report);
  return result;
}

void write_server_usage(std::ostream& out, const std::vector<MetricSample>& rows) {
  out << kUsageHeader << '\n';
  for (const auto& s : rows) {
    out << s.timestamp << ',' << s.machine_id << ',' << format_double(s.cpu_util) << ','
        << format_double(s.mem_util) << ',' << format_double(s.disk_util) << '\n';
  }
}

void write_batch_tasks(std::ostream& out, const std::vector<TaskRecord>& rows) {
  out << kTaskHeader << '\n';
  for (const auto& t : rows) {
    out << t.create_ts << ',';
    write_ts(out, t.end_ts);
    out << ',' << t.job_id << ',' << t.task_id << ',' << t.instance_count << ','
        << to_string(t.status) << '\n';
  }
}

void write_batch_instances(std::ostream& out, const std::vector<InstanceRecord>& rows) {
  out << kInstanceHeader << '\n';
  for (const auto& r : rows) {
    out << r.start_ts << ',';
    write_ts(out, r.end_ts);
    out << ',' << r.job_id << ',' << r.task_id << ',' << r.machine_id << ','
        << to_string(r.status) << '\n';
  }
}

std::string manifest_to_json(const Manifest& m) {
  Json j;
  j["epoch_ts"] = m.epoch_ts;
  j["horizon_seconds"] = m.horizon_seconds;
  j["usage_resolution_s"] = m.usage_resolution_s;
  j["scheduler_resolution_s"] = m.scheduler_resolution_s;
  j["machine_count"] = m.machine_count;
  j["job_count"] = m.job_count;
  j["task_count"] = m.task_count;
  j["instance_count"] = m.instance_count;
  j["format_version"] = m.format_version;
  return j.dump(2) + "\n";
}

Manifest manifest_from_json(std::string_view text) {
  try {
    const auto j = Json::parse(text);
    Manifest m;
    m.epoch_ts = j.value("epoch_ts", m.epoch_ts);
    m.horizon_seconds = j.value("horizon_seconds", m.horizon_seconds);
    m.usage_resolution_s = j.value("usage_resolution_s", m.usage_resolution_s);
    m.scheduler_resolution_s = j.value("scheduler_resolution_s", m.scheduler_resolution_s);
    m.machine_count = j.value("machine_count", m.machine_count);
    m.job_count = j.value("job_count", m.job_count);
    m.task_count = j.value("task_count", m.task_count);
    m.instance_count = j.value("instance_count", m.instance_count);
    m.format_version = j.value("format_version", m.format_version);
    if (m.usage_resolution_s <= 0 || m.scheduler_resolution_s <= 0) {
      throw Error(ErrorCode::InvalidConfig, "resolutions must be positive");
    }
    return m;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad manifest: ") + e.what());
  }
}

std::string labels_to_json(const std::vector<AnomalyLabel>& labels) {
  Json arr = Json::array();
  for (const auto& l : labels) {
    Json j;
    j["job_id"] = l.job_id;
    j["kind"] = to_string(l.kind);
    j["t_start"] = l.t_start;
    j["t_end"] = l.t_end;
    j["machine_ids"] = l.machine_ids;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<AnomalyLabel> labels_from_json(std::string_view text) {
  try {
    std::vector<AnomalyLabel> out;
    for (const auto& j : Json::parse(text)) {
      AnomalyLabel l;
      l.job_id = j.at("job_id").get<std::string>();
      const auto kind = parse_anomaly_kind(j.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown label kind");
      l.kind = *kind;
      l.t_start = j.at("t_start").get<Timestamp>();
      l.t_end = j.at("t_end").get<Timestamp>();
      l.machine_ids = j.at("machine_ids").get<std::vector<std::string>>();
      out.push_back(std::move(l));
    }
    return out;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad labels: ") + e.what());
  }
}

void write_manifest(const Manifest& manifest, const fs::path& dir) {
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest_to_json(manifest);
  if (!out) throw Error(ErrorCode::Unreadable, "cannot write " + (dir / "manifest.json").string());
}

void write_bundle(const TraceBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::Unreadable, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("server_usage.csv");
    write_server_usage(out, bundle.usage);
  }
  {
    auto out = open("batch_task.csv");
    write_batch_tasks(out, bundle.tasks);
  }
  {
    auto out = open("batch_instance.csv");
    write_batch_instances(out, bundle.instances);
  }
  write_manifest(bundle.manifest, dir);
  if (bundle.labels) {
    auto out = open("labels.json");
    out << labels_to_json(*bundle.labels);
  }
}

}  // namespace batchlens
