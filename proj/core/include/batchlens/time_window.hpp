#pragma once

#include <cstdint>
#include <optional>

namespace batchlens {

/// Trace-relative seconds.
using Timestamp = std::int64_t;

/// Half-open interval [t_from, t_to) with t_from < t_to.
class TimeWindow {
 public:
  /// Throws Error(InvalidArgument) unless t_from < t_to.
  TimeWindow(Timestamp t_from, Timestamp t_to);

  Timestamp t_from() const noexcept { return from_; }
  Timestamp t_to() const noexcept { return to_; }
  Timestamp length() const noexcept { return to_ - from_; }

  bool contains(Timestamp t) const noexcept { return from_ <= t && t < to_; }
  bool intersects(const TimeWindow& other) const noexcept {
    return from_ < other.to_ && other.from_ < to_;
  }
  std::optional<TimeWindow> intersect(const TimeWindow& other) const;

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;

 private:
  Timestamp from_;
  Timestamp to_;
};

}  // namespace batchlens
