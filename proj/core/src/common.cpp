#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "batchlens/error.hpp"
#include "batchlens/time_window.hpp"
#include "batchlens/trace.hpp"

namespace batchlens {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

constexpr std::array kMetricNames{"cpu", "mem", "disk"};
constexpr std::array kStatusNames{"Waiting", "Running", "Terminated", "Failed", "Cancelled"};
constexpr std::array kKindNames{"spike", "sync_drop", "thrashing"};

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::NotApplicable: return "NOT_APPLICABLE";
    case ErrorCode::OutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::ZeroDenominator: return "ZERO_DENOMINATOR";
    case ErrorCode::CorruptBundle: return "CORRUPT_BUNDLE";
    case ErrorCode::MissingTable: return "MISSING_TABLE";
    case ErrorCode::EmptyTable: return "EMPTY_TABLE";
    case ErrorCode::BadHeader: return "BAD_HEADER";
    case ErrorCode::Unreadable: return "UNREADABLE";
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
  }
  return "UNKNOWN";
}

TimeWindow::TimeWindow(Timestamp t_from, Timestamp t_to) : from_(t_from), to_(t_to) {
  if (!(t_from < t_to)) {
    throw Error(ErrorCode::InvalidArgument,
                "time window needs t_from < t_to, got [" + std::to_string(t_from) + ", " +
                    std::to_string(t_to) + ")");
  }
}

std::optional<TimeWindow> TimeWindow::intersect(const TimeWindow& other) const {
  const Timestamp lo = std::max(from_, other.from_);
  const Timestamp hi = std::min(to_, other.to_);
  if (lo >= hi) return std::nullopt;
  return TimeWindow(lo, hi);
}

std::string_view to_string(Metric metric) {
  return kMetricNames[static_cast<std::size_t>(metric)];
}

std::optional<Metric> parse_metric(std::string_view text) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
    if (iequals(text, kMetricNames[i])) return static_cast<Metric>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Status status) {
  return kStatusNames[static_cast<std::size_t>(status)];
}

std::optional<Status> parse_status(std::string_view text) {
  for (std::size_t i = 0; i < kStatusNames.size(); ++i) {
    if (iequals(text, kStatusNames[i])) return static_cast<Status>(i);
  }
  return std::nullopt;
}

std::string_view to_string(AnomalyKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<AnomalyKind> parse_anomaly_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (iequals(text, kKindNames[i])) return static_cast<AnomalyKind>(i);
  }
  return std::nullopt;
}

double MetricSample::value(Metric metric) const noexcept {
  switch (metric) {
    case Metric::Cpu: return cpu_util;
    case Metric::Mem: return mem_util;
    case Metric::Disk: return disk_util;
  }
  return 0.0;
}

void ValidationReport::reject(std::string_view table, std::size_t row, std::string_view code,
                              std::string message) {
  errors.push_back({std::string(table), row, std::string(code), std::move(message)});
  // Row 0 marks a table-level problem, which is not a rejected row.
  if (row > 0) ++rows_rejected[std::string(table)];
  rows_accepted.try_emplace(std::string(table), 0);
}

void ValidationReport::warn(std::string_view table, std::size_t row, std::string_view code,
                            std::string message) {
  warnings.push_back({std::string(table), row, std::string(code), std::move(message)});
}

void ValidationReport::accept(std::string_view table) {
  ++rows_accepted[std::string(table)];
  rows_rejected.try_emplace(std::string(table), 0);
}

void ValidationReport::merge(const ValidationReport& other) {
  errors.insert(errors.end(), other.errors.begin(), other.errors.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  for (const auto& [table, n] : other.rows_accepted) rows_accepted[table] += n;
  for (const auto& [table, n] : other.rows_rejected) rows_rejected[table] += n;
}

std::size_t ValidationReport::rows_read(const std::string& table) const {
  std::size_t n = 0;
  if (auto it = rows_accepted.find(table); it != rows_accepted.end()) n += it->second;
  if (auto it = rows_rejected.find(table); it != rows_rejected.end()) n += it->second;
  return n;
}

bool ValidationReport::has_warning(std::string_view code) const {
  return std::any_of(warnings.begin(), warnings.end(),
                     [&](const Issue& i) { return i.code == code; });
}

bool ValidationReport::has_error(std::string_view code) const {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const Issue& i) { return i.code == code; });
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  std::map<std::string, bool> tables;
  for (const auto& [t, _] : rows_accepted) tables[t] = true;
  for (const auto& [t, _] : rows_rejected) tables[t] = true;
  for (const auto& [table, _] : tables) {
    const auto acc = rows_accepted.count(table) ? rows_accepted.at(table) : 0;
    const auto rej = rows_rejected.count(table) ? rows_rejected.at(table) : 0;
    out << table << ": " << acc << " accepted, " << rej << " rejected\n";
  }
  auto dump = [&out](std::string_view label, const std::vector<Issue>& issues) {
    for (const auto& i : issues) {
      out << label << ' ' << i.table;
      if (i.row_number > 0) out << ':' << i.row_number;
      out << ' ' << i.code << ": " << i.message << '\n';
    }
  };
  dump("error", errors);
  dump("warning", warnings);
  out << errors.size() << " error(s), " << warnings.size() << " warning(s)\n";
  return out.str();
}

}  // namespace batchlens
