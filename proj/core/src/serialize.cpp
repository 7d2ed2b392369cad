#include "batchlens/serialize.hpp"

#include <sstream>

#include "batchlens/ingest.hpp"
#include "json_util.hpp"

namespace batchlens {

using detail::Json;

namespace {

Json optional_value(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json circle_fields(Json j, const Circle& c) {
  j["cx"] = c.cx;
  j["cy"] = c.cy;
  j["r"] = c.r;
  return j;
}

Json node_json(const LayoutNode& node) {
  Json j;
  j["id"] = node.id;
  j["kind"] = to_string(node.kind);
  j = circle_fields(std::move(j), node.circle);
  Json annuli = Json::array();
  for (const auto& a : node.annuli) {
    Json ring;
    ring["metric"] = to_string(a.metric);
    ring["r0"] = a.r_inner_frac;
    ring["r1"] = a.r_outer_frac;
    ring["color"] = a.color.hex();
    ring["value"] = optional_value(a.value);
    annuli.push_back(std::move(ring));
  }
  j["annuli"] = std::move(annuli);
  Json children = Json::array();
  for (const auto& c : node.children) children.push_back(node_json(c));
  j["children"] = std::move(children);
  return j;
}

Json series_json(const Series& s) {
  Json j;
  j["machine_id"] = s.machine_id;
  j["metric"] = to_string(s.metric);
  Json pts = Json::array();
  for (const auto& p : s.points) pts.push_back(Json::array({p.timestamp, p.value}));
  j["points"] = std::move(pts);
  return j;
}

Json event_json(const AnomalyEvent& e) {
  Json j;
  j["kind"] = to_string(e.kind);
  j["job_id"] = e.job_id;
  j["machine_ids"] = e.machine_ids;
  j["interval"] = {{"t_from", e.interval.t_from()}, {"t_to", e.interval.t_to()}};
  j["severity"] = e.severity;
  Json evidence = Json::object();
  for (const auto& [metric, values] : e.evidence) {
    Json inner = Json::object();
    for (const auto& [k, v] : values) inner[k] = v;
    evidence[metric] = std::move(inner);
  }
  j["evidence"] = std::move(evidence);
  return j;
}

Json issues_json(const std::vector<Issue>& issues) {
  Json arr = Json::array();
  for (const auto& i : issues) {
    arr.push_back({{"table", i.table}, {"row_number", i.row_number}, {"code", i.code}, {"message", i.message}});
  }
  return arr;
}

}  // namespace

std::string to_json(const Manifest& manifest) {
  return Json::parse(manifest_to_json(manifest)).dump();
}

std::string to_json(const HierarchySnapshot& snapshot) {
  Json j;
  j["timestamp"] = snapshot.timestamp;
  j["out_of_range"] = snapshot.out_of_range;
  Json roots = Json::array();
  for (const auto& job : snapshot.roots) {
    Json tasks = Json::array();
    for (const auto& task : job.tasks) {
      Json machines = Json::array();
      for (const auto& m : task.machines) {
        machines.push_back({{"machine_id", m.machine_id},
                            {"cpu_util", optional_value(m.cpu_util)},
                            {"mem_util", optional_value(m.mem_util)},
                            {"disk_util", optional_value(m.disk_util)}});
      }
      tasks.push_back({{"task_id", task.task_id}, {"machines", std::move(machines)}});
    }
    roots.push_back({{"job_id", job.job_id}, {"tasks", std::move(tasks)}});
  }
  j["roots"] = std::move(roots);
  return j.dump();
}

std::string to_json(const LayoutTree& layout) {
  Json j;
  j["timestamp"] = layout.timestamp;
  j["out_of_range"] = layout.out_of_range;
  j["bounds"] = circle_fields(Json::object(), layout.bounds);
  Json roots = Json::array();
  for (const auto& r : layout.roots) roots.push_back(node_json(r));
  j["roots"] = std::move(roots);
  return j.dump();
}

std::string to_json(const Series& series) { return series_json(series).dump(); }

std::string to_json(const SeriesBundle& bundle) {
  Json j;
  j["job_id"] = bundle.job_id;
  j["metric"] = to_string(bundle.metric);
  Json series = Json::array();
  for (const auto& s : bundle.series) series.push_back(series_json(s));
  j["series"] = std::move(series);
  Json annotations = Json::array();
  for (const auto& a : bundle.annotations) {
    annotations.push_back({{"kind", to_string(a.kind)},
                           {"timestamp", a.timestamp},
                           {"task_id", a.task_id},
                           {"machine_id", a.machine_id}});
  }
  j["annotations"] = std::move(annotations);
  Json colors = Json::object();
  for (const auto& [task, idx] : bundle.task_color_index) colors[task] = idx;
  j["task_color_index"] = std::move(colors);
  return j.dump();
}

std::string to_json(const AggregateSeries& aggregate) {
  Json j;
  j["metric"] = to_string(aggregate.metric);
  j["resolution_s"] = aggregate.resolution_s;
  Json pts = Json::array();
  for (const auto& p : aggregate.points) {
    pts.push_back({{"timestamp", p.timestamp}, {"mean", p.mean}, {"min", p.min}, {"max", p.max},
                   {"samples", p.samples}});
  }
  j["points"] = std::move(pts);
  return j.dump();
}

std::string to_json(const std::vector<JobSummary>& jobs) {
  Json arr = Json::array();
  for (const auto& job : jobs) {
    arr.push_back({{"job_id", job.job_id},
                   {"task_count", job.task_count},
                   {"instance_count", job.instance_count},
                   {"start_ts", job.start_ts},
                   {"end_ts", job.end_ts ? Json(*job.end_ts) : Json(nullptr)},
                   {"machine_set", job.machine_set}});
  }
  return arr.dump();
}

std::string to_json(const DistributionStats& stats) {
  Json j;
  j["fraction_single_task_jobs"] = stats.fraction_single_task_jobs;
  j["fraction_multi_instance_tasks"] = stats.fraction_multi_instance_tasks;
  j["machine_count"] = stats.machine_count;
  j["job_count"] = stats.job_count;
  return j.dump();
}

std::string to_json(const std::vector<AnomalyEvent>& events) {
  Json arr = Json::array();
  for (const auto& e : events) arr.push_back(event_json(e));
  return arr.dump();
}

std::string to_json(const Detection& detection) {
  Json j;
  Json events = Json::array();
  for (const auto& e : detection.events) events.push_back(event_json(e));
  j["events"] = std::move(events);
  Json diags = Json::array();
  for (const auto& d : detection.diagnostics) {
    diags.push_back({{"job_id", d.job_id}, {"machine_id", d.machine_id}, {"message", d.message}});
  }
  j["diagnostics"] = std::move(diags);
  return j.dump();
}

std::string to_json(const ValidationReport& report) {
  Json j;
  j["errors"] = issues_json(report.errors);
  j["warnings"] = issues_json(report.warnings);
  Json acc = Json::object();
  for (const auto& [t, n] : report.rows_accepted) acc[t] = n;
  Json rej = Json::object();
  for (const auto& [t, n] : report.rows_rejected) rej[t] = n;
  j["rows_accepted"] = std::move(acc);
  j["rows_rejected"] = std::move(rej);
  return j.dump();
}

std::string anomalies_to_csv(const std::vector<AnomalyEvent>& events) {
  std::ostringstream out;
  out << "kind,job_id,t_from,t_to,severity,machines\n";
  for (const auto& e : events) {
    out << to_string(e.kind) << ',' << e.job_id << ',' << e.interval.t_from() << ',' << e.interval.t_to()
        << ',' << format_double(e.severity) << ',';
    for (std::size_t i = 0; i < e.machine_ids.size(); ++i) {
      if (i > 0) out << ';';
      out << e.machine_ids[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace batchlens
