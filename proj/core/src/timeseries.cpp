#include "batchlens/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "batchlens/error.hpp"

namespace batchlens {

std::string_view to_string(AnnotationKind kind) {
  return kind == AnnotationKind::Start ? "start" : "end";
}

namespace {

std::vector<SeriesPoint> slice_points(std::span<const UsagePoint> usage, Metric metric,
                                      const TimeWindow& window) {
  auto lo = std::lower_bound(usage.begin(), usage.end(), window.t_from(),
                             [](const UsagePoint& p, Timestamp t) { return p.timestamp < t; });
  std::vector<SeriesPoint> out;
  for (auto it = lo; it != usage.end() && it->timestamp < window.t_to(); ++it) {
    out.push_back({it->timestamp, it->value(metric)});
  }
  return out;
}

}  // namespace

Series machine_series(const TraceStore& store, const std::string& machine_id, Metric metric,
                      const TimeWindow& window) {
  return Series{machine_id, metric, slice_points(store.usage(machine_id), metric, window)};
}

SeriesBundle job_series_bundle(const TraceStore& store, const std::string& job_id, Metric metric,
                               const TimeWindow& window) {
  SeriesBundle bundle;
  bundle.job_id = job_id;
  bundle.metric = metric;
  const auto tasks = store.tasks_of_job(job_id);  // throws NotFound
  std::size_t color = 0;
  for (const auto& t : tasks) bundle.task_color_index[t.task_id] = color++;

  for (const auto& machine : store.machines_of_job(job_id)) {
    bundle.series.push_back(machine_series(store, machine, metric, window));
  }
  std::set<Annotation> annotations;
  for (const auto* inst : store.instances_of_job(job_id)) {
    if (window.contains(inst->start_ts)) {
      annotations.insert({AnnotationKind::Start, inst->start_ts, inst->task_id, inst->machine_id});
    }
    if (inst->end_ts && window.contains(*inst->end_ts)) {
      annotations.insert({AnnotationKind::End, *inst->end_ts, inst->task_id, inst->machine_id});
    }
  }
  bundle.annotations.assign(annotations.begin(), annotations.end());
  std::stable_sort(bundle.annotations.begin(), bundle.annotations.end(),
                   [](const Annotation& a, const Annotation& b) { return a.timestamp < b.timestamp; });
  return bundle;
}

AggregateSeries cluster_timeline(const TraceStore& store, Metric metric, std::int64_t resolution_s) {
  if (resolution_s < store.usage_resolution() || resolution_s <= 0) {
    throw Error(ErrorCode::InvalidArgument,
                "timeline resolution " + std::to_string(resolution_s) +
                    "s is finer than the usage resolution " +
                    std::to_string(store.usage_resolution()) + "s");
  }
  struct Acc {
    double sum = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
  };
  std::map<Timestamp, Acc> steps;
  for (const auto& machine : store.machines()) {
    for (const auto& p : store.usage(machine)) {
      const Timestamp step = (p.timestamp / resolution_s) * resolution_s;
      const double v = p.value(metric);
      auto& acc = steps[step];
      if (acc.n == 0) {
        acc.min = acc.max = v;
      } else {
        acc.min = std::min(acc.min, v);
        acc.max = std::max(acc.max, v);
      }
      acc.sum += v;
      ++acc.n;
    }
  }
  AggregateSeries out;
  out.metric = metric;
  out.resolution_s = resolution_s;
  out.points.reserve(steps.size());
  for (const auto& [t, acc] : steps) {
    const double mean = std::clamp(acc.sum / static_cast<double>(acc.n), acc.min, acc.max);
    out.points.push_back({t, mean, acc.min, acc.max, acc.n});
  }
  return out;
}

Series downsample(const Series& series, std::size_t target_points) {
  if (target_points < 2) {
    throw Error(ErrorCode::InvalidArgument, "downsample needs at least 2 target points");
  }
  const auto& pts = series.points;
  const std::size_t n = pts.size();
  if (n <= target_points) return series;

  Series out{series.machine_id, series.metric, {}};
  out.points.reserve(target_points);
  out.points.push_back(pts.front());

  // Interior points are split into target_points - 2 buckets; each bucket
  // contributes the point forming the largest triangle with the previously
  // kept point and the average of the next bucket.
  const double bucket = static_cast<double>(n - 2) / static_cast<double>(target_points - 2);
  std::size_t anchor = 0;
  for (std::size_t b = 0; b + 2 < target_points; ++b) {
    const auto lo = static_cast<std::size_t>(std::floor(static_cast<double>(b) * bucket)) + 1;
    const auto hi = static_cast<std::size_t>(std::floor(static_cast<double>(b + 1) * bucket)) + 1;

    const auto next_lo = hi;
    const auto next_hi = std::min(n, static_cast<std::size_t>(std::floor(static_cast<double>(b + 2) * bucket)) + 1);
    double avg_x = 0.0;
    double avg_y = 0.0;
    for (std::size_t i = next_lo; i < next_hi; ++i) {
      avg_x += static_cast<double>(pts[i].timestamp);
      avg_y += pts[i].value;
    }
    const auto count = static_cast<double>(next_hi - next_lo);
    avg_x /= count;
    avg_y /= count;

    const double ax = static_cast<double>(pts[anchor].timestamp);
    const double ay = pts[anchor].value;
    double best_area = -1.0;
    std::size_t best = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      const double area = std::abs((ax - avg_x) * (pts[i].value - ay) -
                                   (ax - static_cast<double>(pts[i].timestamp)) * (avg_y - ay)) * 0.5;
      if (area > best_area) {
        best_area = area;
        best = i;
      }
    }
    out.points.push_back(pts[best]);
    anchor = best;
  }
  out.points.push_back(pts.back());
  return out;
}

SeriesBundle brush_slice(const SeriesBundle& bundle, const TimeWindow& window) {
  SeriesBundle out;
  out.job_id = bundle.job_id;
  out.metric = bundle.metric;
  out.task_color_index = bundle.task_color_index;
  for (const auto& s : bundle.series) {
    Series sliced{s.machine_id, s.metric, {}};
    for (const auto& p : s.points) {
      if (window.contains(p.timestamp)) sliced.points.push_back(p);
    }
    out.series.push_back(std::move(sliced));
  }
  for (const auto& a : bundle.annotations) {
    if (window.contains(a.timestamp)) out.annotations.push_back(a);
  }
  return out;
}

}  // namespace batchlens
