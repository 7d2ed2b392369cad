#include "batchlens/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <tuple>

#include "batchlens/error.hpp"

namespace batchlens {

std::string_view to_string(Band band) {
  switch (band) {
    case Band::Idle: return "idle";
    case Band::Low: return "low";
    case Band::Medium: return "medium";
    case Band::High: return "high";
  }
  return "idle";
}

Band classify_band(double value) {
  if (std::isnan(value) || value < 20.0) return Band::Idle;
  if (value < 40.0) return Band::Low;
  if (value < 80.0) return Band::Medium;
  return Band::High;
}

void DetectorConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, what);
  };
  require(spike.baseline_window_s > 0, "spike.baseline_window_s must be positive");
  require(spike.min_rise_points > 0, "spike.min_rise_points must be positive");
  require(spike.min_abs_level > 0, "spike.min_abs_level must be positive");
  require(sync_drop.machine_fraction > 0 && sync_drop.machine_fraction <= 1,
          "sync_drop.machine_fraction must be in (0, 1]");
  require(sync_drop.min_drop_points > 0, "sync_drop.min_drop_points must be positive");
  require(sync_drop.max_lag_steps > 0, "sync_drop.max_lag_steps must be positive");
  require(thrashing.mem_floor > 0, "thrashing.mem_floor must be positive");
  require(thrashing.cpu_decline_points > 0, "thrashing.cpu_decline_points must be positive");
  require(thrashing.persist_steps_after_end > 0, "thrashing.persist_steps_after_end must be positive");
  require(thrashing.min_duration_s > 0, "thrashing.min_duration_s must be positive");
}

namespace {

double median(std::vector<double> values) {
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

double normalized_excess(double value, double threshold) {
  if (threshold >= 100.0) return value > threshold ? 1.0 : 0.0;
  return std::clamp((value - threshold) / (100.0 - threshold), 0.0, 1.0);
}

const Series* find_series(const SeriesBundle& bundle, const std::string& machine_id) {
  for (const auto& s : bundle.series) {
    if (s.machine_id == machine_id) return &s;
  }
  return nullptr;
}

std::vector<double> values_in(const Series& s, Timestamp from, Timestamp to) {
  std::vector<double> out;
  for (const auto& p : s.points) {
    if (p.timestamp >= from && p.timestamp < to) out.push_back(p.value);
  }
  return out;
}

}  // namespace

Detection detect_spikes(const SeriesBundle& cpu, const SeriesBundle& mem, const JobBounds& bounds,
                        std::int64_t resolution_s, const DetectorConfig& cfg) {
  Detection out;
  const auto& sc = cfg.spike;
  for (const auto& cpu_series : cpu.series) {
    const auto& machine = cpu_series.machine_id;
    const Series* mem_series = find_series(mem, machine);
    if (!mem_series) {
      out.diagnostics.push_back({bounds.job_id, machine, "spike: no memory series"});
      continue;
    }
    const auto pre_from = bounds.start_ts - sc.baseline_window_s;
    const auto cpu_pre = values_in(cpu_series, pre_from, bounds.start_ts);
    const auto mem_pre = values_in(*mem_series, pre_from, bounds.start_ts);
    if (cpu_pre.size() < kMinBaselineSamples || mem_pre.size() < kMinBaselineSamples) {
      out.diagnostics.push_back({bounds.job_id, machine,
                                 "spike: only " + std::to_string(std::min(cpu_pre.size(), mem_pre.size())) +
                                     " pre-start samples, skipped"});
      continue;
    }
    const double cpu_base = median(cpu_pre);
    const double mem_base = median(mem_pre);
    const double cpu_threshold = cpu_base + sc.min_rise_points;
    const double mem_threshold = mem_base + sc.min_rise_points;
    const double cpu_level = std::max(cpu_threshold, sc.min_abs_level);
    const double mem_level = std::max(mem_threshold, sc.min_abs_level);

    std::optional<Timestamp> first;
    Timestamp last = 0;
    double cpu_peak = 0.0;
    double mem_peak = 0.0;
    double severity = 0.0;
    auto m_it = mem_series->points.begin();
    for (const auto& p : cpu_series.points) {
      if (p.timestamp < bounds.start_ts || p.timestamp >= bounds.end_ts) continue;
      while (m_it != mem_series->points.end() && m_it->timestamp < p.timestamp) ++m_it;
      if (m_it == mem_series->points.end() || m_it->timestamp != p.timestamp) continue;
      const double c = p.value;
      const double m = m_it->value;
      if (c > cpu_threshold && c >= sc.min_abs_level && m > mem_threshold && m >= sc.min_abs_level) {
        if (!first) first = p.timestamp;
        last = p.timestamp;
        cpu_peak = std::max(cpu_peak, c);
        mem_peak = std::max(mem_peak, m);
        severity = std::max(severity, std::min(normalized_excess(c, cpu_level),
                                               normalized_excess(m, mem_level)));
      }
    }
    if (!first) continue;
    AnomalyEvent e;
    e.kind = AnomalyKind::Spike;
    e.job_id = bounds.job_id;
    e.machine_ids = {machine};
    e.interval = TimeWindow(*first, last + resolution_s);
    e.severity = severity;
    e.evidence["cpu"] = {{"baseline_median", cpu_base}, {"threshold", cpu_level}, {"peak", cpu_peak}};
    e.evidence["mem"] = {{"baseline_median", mem_base}, {"threshold", mem_level}, {"peak", mem_peak}};
    out.events.push_back(std::move(e));
  }
  return out;
}

Detection detect_sync_drop(const SeriesBundle& cpu, const JobBounds& bounds,
                           std::int64_t resolution_s, const DetectorConfig& cfg) {
  Detection out;
  const auto& dc = cfg.sync_drop;
  if (cpu.series.size() < 2) {
    out.diagnostics.push_back({bounds.job_id, "", "sync_drop: job runs on fewer than 2 machines"});
    return out;
  }
  const Timestamp lag = dc.max_lag_steps * resolution_s;

  struct Drop {
    std::string machine;
    Timestamp last_pre;
    Timestamp first_drop;
    double amount;
  };
  std::vector<Drop> drops;
  for (const auto& s : cpu.series) {
    std::vector<double> pre;
    Timestamp last_pre = 0;
    for (const auto& p : s.points) {
      if (p.timestamp >= bounds.start_ts - lag && p.timestamp < bounds.start_ts) {
        pre.push_back(p.value);
        last_pre = p.timestamp;
      }
    }
    if (pre.empty()) {
      out.diagnostics.push_back({bounds.job_id, s.machine_id, "sync_drop: no samples before job start"});
      continue;
    }
    const double pre_level = median(pre);
    std::optional<Timestamp> first_drop;
    double amount = 0.0;
    for (const auto& p : s.points) {
      if (p.timestamp < bounds.start_ts || p.timestamp > bounds.start_ts + lag) continue;
      const double d = pre_level - p.value;
      if (d >= dc.min_drop_points && !first_drop) first_drop = p.timestamp;
      amount = std::max(amount, d);
    }
    if (first_drop) drops.push_back({s.machine_id, last_pre, *first_drop, amount});
  }

  const double fraction = static_cast<double>(drops.size()) / static_cast<double>(cpu.series.size());
  if (drops.empty() || fraction < dc.machine_fraction) return out;

  AnomalyEvent e;
  e.kind = AnomalyKind::SyncDrop;
  e.job_id = bounds.job_id;
  Timestamp from = drops.front().last_pre;
  Timestamp to = drops.front().first_drop;
  double total = 0.0;
  for (const auto& d : drops) {
    e.machine_ids.push_back(d.machine);
    from = std::min(from, d.last_pre);
    to = std::max(to, d.first_drop);
    total += d.amount;
  }
  std::sort(e.machine_ids.begin(), e.machine_ids.end());
  const double mean_drop = total / static_cast<double>(drops.size());
  e.interval = TimeWindow(from, to + resolution_s);
  e.severity = normalized_excess(mean_drop, dc.min_drop_points);
  e.evidence["cpu"] = {{"machine_fraction", fraction},
                       {"dropping_machines", static_cast<double>(drops.size())},
                       {"total_machines", static_cast<double>(cpu.series.size())},
                       {"mean_drop", mean_drop}};
  out.events.push_back(std::move(e));
  return out;
}

Detection detect_thrashing(const TraceStore& store, const std::string& job_id,
                           const DetectorConfig& cfg) {
  const auto [start, end_opt] = store.job_time_bounds(job_id);
  if (!end_opt) {
    throw Error(ErrorCode::NotApplicable, "thrashing needs a finished job; " + job_id + " is still running");
  }
  const Timestamp end = *end_opt;
  const auto R = store.usage_resolution();
  const auto& tc = cfg.thrashing;
  Detection out;

  for (const auto& machine : store.machines_of_job(job_id)) {
    const auto usage = store.usage(machine);

    // Longest cpu drawdown over runs of consecutive samples with memory
    // pinned above the floor.
    struct Run {
      Timestamp first = 0;
      Timestamp last = 0;
      double drawdown = 0.0;
      double peak_cpu = 0.0;
      double min_mem = 100.0;
    };
    std::optional<Run> best;
    std::optional<Run> current;
    double running_max = 0.0;
    auto close_run = [&] {
      if (current && current->last - current->first + R >= tc.min_duration_s &&
          current->drawdown >= tc.cpu_decline_points && (!best || current->drawdown > best->drawdown)) {
        best = current;
      }
      current.reset();
    };
    for (const auto& p : usage) {
      if (p.timestamp < start || p.timestamp >= end) continue;
      const bool pinned = p.mem >= tc.mem_floor;
      if (current && (!pinned || p.timestamp - current->last > R)) close_run();
      if (!pinned) continue;
      if (!current) {
        current = Run{p.timestamp, p.timestamp, 0.0, p.cpu, p.mem};
        running_max = p.cpu;
      }
      current->last = p.timestamp;
      running_max = std::max(running_max, p.cpu);
      current->drawdown = std::max(current->drawdown, running_max - p.cpu);
      current->peak_cpu = running_max;
      current->min_mem = std::min(current->min_mem, p.mem);
    }
    close_run();
    if (!best) continue;

    // The signature has to outlive the job.
    std::int64_t persisted = 0;
    Timestamp expected = end;
    for (const auto& p : usage) {
      if (p.timestamp < end) continue;
      if (p.timestamp >= expected + R) break;
      if (p.mem < tc.mem_floor || p.cpu <= 0.0 || p.disk <= 0.0) break;
      ++persisted;
      expected = p.timestamp + R;
    }
    if (persisted < tc.persist_steps_after_end) {
      out.diagnostics.push_back({job_id, machine,
                                 "thrashing: pattern inside job but only " + std::to_string(persisted) +
                                     " post-end steps"});
      continue;
    }

    AnomalyEvent e;
    e.kind = AnomalyKind::Thrashing;
    e.job_id = job_id;
    e.machine_ids = {machine};
    e.interval = TimeWindow(best->first, best->last + R);
    e.severity = normalized_excess(best->drawdown, tc.cpu_decline_points);
    e.evidence["cpu"] = {{"drawdown", best->drawdown}, {"peak", best->peak_cpu}};
    e.evidence["mem"] = {{"min_in_window", best->min_mem}, {"floor", tc.mem_floor}};
    e.evidence["persistence"] = {{"post_end_steps", static_cast<double>(persisted)}};
    out.events.push_back(std::move(e));
  }
  return out;
}

namespace {

Detection scan_job(const TraceStore& store, const JobSummary& job, const DetectorConfig& cfg) {
  Detection out;
  if (job.machine_set.empty()) return out;
  const auto horizon = store.horizon();
  const Timestamp end = job.end_ts.value_or(horizon.t_to());
  const JobBounds bounds{job.job_id, job.start_ts, std::max(end, job.start_ts + 1)};

  const Timestamp from = std::max(horizon.t_from(), job.start_ts - cfg.spike.baseline_window_s);
  const Timestamp to = std::max(from + 1, std::min(horizon.t_to(), end + cfg.spike.baseline_window_s));
  const TimeWindow window(from, to);
  const auto cpu = job_series_bundle(store, job.job_id, Metric::Cpu, window);
  const auto mem = job_series_bundle(store, job.job_id, Metric::Mem, window);
  const auto R = store.usage_resolution();

  auto absorb = [&out](Detection&& d) {
    std::move(d.events.begin(), d.events.end(), std::back_inserter(out.events));
    std::move(d.diagnostics.begin(), d.diagnostics.end(), std::back_inserter(out.diagnostics));
  };
  absorb(detect_spikes(cpu, mem, bounds, R, cfg));
  absorb(detect_sync_drop(cpu, bounds, R, cfg));
  if (job.end_ts) absorb(detect_thrashing(store, job.job_id, cfg));
  return out;
}

}  // namespace

Detection scan_window(const TraceStore& store, const TimeWindow& window, const DetectorConfig& cfg) {
  cfg.validate();
  std::vector<const JobSummary*> jobs;
  for (const auto& [_, job] : store.jobs()) {
    const Timestamp end = job.end_ts.value_or(store.horizon().t_to());
    const TimeWindow span(job.start_ts, std::max(end, job.start_ts + 1));
    if (span.intersects(window)) jobs.push_back(&job);
  }

  std::vector<Detection> per_job(jobs.size());
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(jobs.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < jobs.size(); i += workers) per_job[i] = scan_job(store, *jobs[i], cfg);
      });
    }
  }

  Detection out;
  for (auto& d : per_job) {
    std::move(d.events.begin(), d.events.end(), std::back_inserter(out.events));
    std::move(d.diagnostics.begin(), d.diagnostics.end(), std::back_inserter(out.diagnostics));
  }
  std::stable_sort(out.events.begin(), out.events.end(), [](const AnomalyEvent& a, const AnomalyEvent& b) {
    const auto ka = a.interval.t_from();
    const auto kb = b.interval.t_from();
    return std::tie(ka, a.job_id, a.kind, a.machine_ids) < std::tie(kb, b.job_id, b.kind, b.machine_ids);
  });
  return out;
}

}  // namespace batchlens
