#include "batchlens/store.hpp"

#include <algorithm>
#include <set>

#include "batchlens/error.hpp"

namespace batchlens {

double UsagePoint::value(Metric metric) const noexcept {
  switch (metric) {
    case Metric::Cpu: return cpu;
    case Metric::Mem: return mem;
    case Metric::Disk: return disk;
  }
  return 0.0;
}

TraceStore build_store(const TraceBundle& bundle) {
  TraceStore store;
  store.manifest_ = bundle.manifest;

  for (const auto& t : bundle.tasks) store.tasks_by_job_[t.job_id].push_back(t);
  for (auto& [_, tasks] : store.tasks_by_job_) {
    std::sort(tasks.begin(), tasks.end(),
              [](const TaskRecord& a, const TaskRecord& b) { return a.task_id < b.task_id; });
  }

  std::set<std::pair<std::string, std::string>> task_keys;
  for (const auto& t : bundle.tasks) task_keys.emplace(t.job_id, t.task_id);
  for (const auto& inst : bundle.instances) {
    if (task_keys.contains({inst.job_id, inst.task_id})) {
      store.instances_.push_back(inst);
    } else {
      ++store.orphans_;
    }
  }
  if (!bundle.instances.empty() && store.orphans_ * 2 > bundle.instances.size()) {
    throw Error(ErrorCode::CorruptBundle,
                std::to_string(store.orphans_) + " of " + std::to_string(bundle.instances.size()) +
                    " instances reference unknown tasks; tables likely come from different traces");
  }

  std::set<std::string> machines;
  for (std::size_t i = 0; i < store.instances_.size(); ++i) {
    const auto& inst = store.instances_[i];
    store.by_job_[inst.job_id].push_back(i);
    store.by_task_[{inst.job_id, inst.task_id}].push_back(i);
    store.by_machine_[inst.machine_id].push_back(i);
    machines.insert(inst.machine_id);
  }
  store.by_start_.resize(store.instances_.size());
  for (std::size_t i = 0; i < store.by_start_.size(); ++i) store.by_start_[i] = i;
  std::stable_sort(store.by_start_.begin(), store.by_start_.end(), [&](std::size_t a, std::size_t b) {
    return store.instances_[a].start_ts < store.instances_[b].start_ts;
  });

  for (const auto& s : bundle.usage) {
    store.usage_[s.machine_id].push_back({s.timestamp, s.cpu_util, s.mem_util, s.disk_util});
    machines.insert(s.machine_id);
  }
  for (auto& [machine, points] : store.usage_) {
    std::sort(points.begin(), points.end(),
              [](const UsagePoint& a, const UsagePoint& b) { return a.timestamp < b.timestamp; });
    // Keep the first sample per timestamp so the series stays strictly increasing.
    points.erase(std::unique(points.begin(), points.end(),
                             [](const UsagePoint& a, const UsagePoint& b) {
                               return a.timestamp == b.timestamp;
                             }),
                 points.end());
  }
  // Machines only seen in instance data keep an empty series.
  for (const auto& m : machines) store.usage_.try_emplace(m);
  store.machines_.assign(machines.begin(), machines.end());

  for (const auto& [job_id, tasks] : store.tasks_by_job_) {
    JobSummary summary;
    summary.job_id = job_id;
    summary.task_count = tasks.size();
    const auto it = store.by_job_.find(job_id);
    if (it != store.by_job_.end() && !it->second.empty()) {
      std::set<std::string> job_machines;
      Timestamp start = store.instances_[it->second.front()].start_ts;
      Timestamp end = 0;
      bool finished = true;
      for (auto idx : it->second) {
        const auto& inst = store.instances_[idx];
        start = std::min(start, inst.start_ts);
        if (inst.end_ts) {
          end = std::max(end, *inst.end_ts);
        } else {
          finished = false;
        }
        job_machines.insert(inst.machine_id);
      }
      summary.instance_count = it->second.size();
      summary.start_ts = start;
      if (finished) summary.end_ts = end;
      summary.machine_set.assign(job_machines.begin(), job_machines.end());
    } else {
      // No instances: fall back to the task table.
      Timestamp start = tasks.front().create_ts;
      Timestamp end = 0;
      bool finished = true;
      for (const auto& t : tasks) {
        start = std::min(start, t.create_ts);
        if (t.end_ts) {
          end = std::max(end, *t.end_ts);
        } else {
          finished = false;
        }
      }
      summary.start_ts = start;
      if (finished) summary.end_ts = end;
    }
    store.jobs_.emplace(job_id, std::move(summary));
  }
  return store;
}

bool TraceStore::has_machine(const std::string& machine_id) const {
  return usage_.contains(machine_id);
}

const JobSummary& TraceStore::job(const std::string& job_id) const {
  const auto it = jobs_.find(job_id);
  if (it == jobs_.end()) throw Error(ErrorCode::NotFound, "unknown job " + job_id);
  return it->second;
}

std::span<const TaskRecord> TraceStore::tasks_of_job(const std::string& job_id) const {
  const auto it = tasks_by_job_.find(job_id);
  if (it == tasks_by_job_.end()) throw Error(ErrorCode::NotFound, "unknown job " + job_id);
  return it->second;
}

namespace {

std::vector<const InstanceRecord*> resolve(const std::vector<InstanceRecord>& all,
                                           const std::vector<std::size_t>* idx) {
  std::vector<const InstanceRecord*> out;
  if (!idx) return out;
  out.reserve(idx->size());
  for (auto i : *idx) out.push_back(&all[i]);
  return out;
}

template <typename Map, typename Key>
const std::vector<std::size_t>* find_list(const Map& map, const Key& key) {
  const auto it = map.find(key);
  return it == map.end() ? nullptr : &it->second;
}

}  // namespace

std::vector<const InstanceRecord*> TraceStore::instances_of_job(const std::string& job_id) const {
  return resolve(instances_, find_list(by_job_, job_id));
}

std::vector<const InstanceRecord*> TraceStore::instances_of_task(const std::string& job_id,
                                                                 const std::string& task_id) const {
  return resolve(instances_, find_list(by_task_, std::pair{job_id, task_id}));
}

std::vector<const InstanceRecord*> TraceStore::instances_on_machine(
    const std::string& machine_id) const {
  return resolve(instances_, find_list(by_machine_, machine_id));
}

std::span<const UsagePoint> TraceStore::usage(const std::string& machine_id) const {
  const auto it = usage_.find(machine_id);
  if (it == usage_.end()) throw Error(ErrorCode::NotFound, "unknown machine " + machine_id);
  return it->second;
}

std::optional<UsagePoint> TraceStore::sample_at(const std::string& machine_id, Timestamp t) const {
  const auto points = usage(machine_id);
  auto it = std::upper_bound(points.begin(), points.end(), t,
                             [](Timestamp v, const UsagePoint& p) { return v < p.timestamp; });
  if (it == points.begin()) return std::nullopt;
  --it;
  if (t - it->timestamp >= usage_resolution()) return std::nullopt;
  return *it;
}

const std::vector<std::string>& TraceStore::machines_of_job(const std::string& job_id) const {
  return job(job_id).machine_set;
}

std::pair<Timestamp, std::optional<Timestamp>> TraceStore::job_time_bounds(
    const std::string& job_id) const {
  const auto& j = job(job_id);
  return {j.start_ts, j.end_ts};
}

std::span<const std::size_t> TraceStore::started_by(Timestamp t) const {
  const auto it = std::upper_bound(by_start_.begin(), by_start_.end(), t,
                                   [&](Timestamp v, std::size_t i) { return v < instances_[i].start_ts; });
  return {by_start_.data(), static_cast<std::size_t>(it - by_start_.begin())};
}

TimedQuery<std::vector<std::string>> TraceStore::active_jobs_at(Timestamp t) const {
  TimedQuery<std::vector<std::string>> result;
  if (!horizon().contains(t)) {
    result.out_of_range = true;
    return result;
  }
  std::set<std::string> active;
  for (auto i : started_by(t)) {
    const auto& inst = instances_[i];
    if (inst.active_at(t)) active.insert(inst.job_id);
  }
  result.value.assign(active.begin(), active.end());
  return result;
}

TimedQuery<std::map<std::string, std::vector<std::string>>> TraceStore::multi_job_machines_at(
    Timestamp t) const {
  TimedQuery<std::map<std::string, std::vector<std::string>>> result;
  if (!horizon().contains(t)) {
    result.out_of_range = true;
    return result;
  }
  std::map<std::string, std::set<std::string>> jobs_on;
  for (auto i : started_by(t)) {
    const auto& inst = instances_[i];
    if (inst.active_at(t)) jobs_on[inst.machine_id].insert(inst.job_id);
  }
  for (auto& [machine, jobs] : jobs_on) {
    if (jobs.size() >= 2) result.value.emplace(machine, std::vector<std::string>(jobs.begin(), jobs.end()));
  }
  return result;
}

DistributionStats TraceStore::distribution_stats() const {
  if (jobs_.empty()) throw Error(ErrorCode::ZeroDenominator, "store has no jobs");
  DistributionStats stats;
  std::size_t single = 0;
  for (const auto& [_, j] : jobs_) {
    if (j.task_count == 1) ++single;
  }
  std::size_t with_instances = 0;
  std::size_t multi = 0;
  for (const auto& [_, list] : by_task_) {
    if (list.empty()) continue;
    ++with_instances;
    if (list.size() >= 2) ++multi;
  }
  stats.job_count = jobs_.size();
  stats.machine_count = machines_.size();
  stats.fraction_single_task_jobs = static_cast<double>(single) / static_cast<double>(jobs_.size());
  stats.fraction_multi_instance_tasks =
      with_instances == 0 ? 0.0 : static_cast<double>(multi) / static_cast<double>(with_instances);
  return stats;
}

}  // namespace batchlens
