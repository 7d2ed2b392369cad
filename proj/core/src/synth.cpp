#include "batchlens/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "batchlens/error.hpp"
#include "batchlens/ingest.hpp"
#include "json_util.hpp"

namespace batchlens {

namespace {

constexpr std::array kScenarioNames{"stable_low", "spike", "sync_drop", "thrashing"};

// mt19937_64's output sequence is fixed by the standard; the distributions
// in <random> are not, so draws are built from raw bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // [0, n)
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }
  bool chance(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

std::string padded_id(std::string_view prefix, std::size_t n, std::size_t total) {
  const auto width = std::to_string(total).size();
  auto digits = std::to_string(n);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return std::string(prefix) + digits;
}

double round2(double v) { return std::round(std::clamp(v, 0.0, 100.0) * 100.0) / 100.0; }

Timestamp align_down(double t, std::int64_t step) {
  return static_cast<Timestamp>(std::floor(t / static_cast<double>(step))) * step;
}

// Slowly varying level inside [22, 38] that every machine idles at.
struct Baseline {
  std::array<double, 3> level{};
  std::array<double, 3> phase{};
  double period = 3600.0;

  double at(std::size_t metric, Timestamp t) const {
    return level[metric] +
           3.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase[metric]);
  }
};

enum class Role { Idle, Spike, SyncDrop, Thrashing };

struct MachinePlan {
  std::string id;
  Baseline baseline;
  Role role = Role::Idle;
  Timestamp start = 0;
  Timestamp end = 0;
  double pre_cpu = 0.0;  // elevated level before a sync_drop / thrashing job
  double pre_mem = 0.0;
  double low_cpu = 0.0;  // level after a sync drop
};

struct JobPlan {
  std::string job_id;
  Scenario scenario = Scenario::StableLow;
  Timestamp start = 0;
  std::optional<Timestamp> end;
  std::vector<std::size_t> machines;  // anomalous jobs only
};

void validate(const SynthConfig& c, std::size_t anomalous) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (c.machine_count < 1) fail("machine_count must be at least 1");
  if (c.job_count < 1) fail("job_count must be at least 1");
  if (c.usage_resolution_s <= 0 || c.scheduler_resolution_s <= 0) fail("resolutions must be positive");
  if (c.horizon_seconds <= 0) fail("horizon_seconds must be positive");
  if (c.horizon_seconds % c.usage_resolution_s != 0) {
    fail("horizon_seconds must be a multiple of usage_resolution_s");
  }
  if (!std::isfinite(c.noise_amplitude) || c.noise_amplitude < 0.0) {
    fail("noise_amplitude must be a non-negative number");
  }
  std::size_t total = 0;
  for (const auto& [_, n] : c.scenario_mix) total += n;
  if (total != c.job_count) {
    fail("scenario mix sums to " + std::to_string(total) + " but job_count is " +
         std::to_string(c.job_count));
  }
  if (anomalous > 0 &&
      c.horizon_seconds < kSynthLeadSeconds + kSynthMaxAnomalySeconds + kSynthTailSeconds) {
    fail("horizon too short for anomalous scenarios");
  }
}

}  // namespace

std::string_view to_string(Scenario scenario) {
  return kScenarioNames[static_cast<std::size_t>(scenario)];
}

std::optional<Scenario> parse_scenario(std::string_view text) {
  for (std::size_t i = 0; i < kScenarioNames.size(); ++i) {
    if (text == kScenarioNames[i]) return static_cast<Scenario>(i);
  }
  return std::nullopt;
}

SynthConfig synth_config_from_json(std::string_view text) {
  using detail::Json;
  SynthConfig c;
  try {
    const auto j = Json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "synth config must be an object");
    static const std::set<std::string> kKeys{"seed", "machine_count", "job_count", "horizon_seconds",
                                             "usage_resolution_s", "scheduler_resolution_s",
                                             "noise_amplitude", "scenario_mix"};
    for (const auto& [key, _] : j.items()) {
      if (!kKeys.contains(key) && !parse_scenario(key)) {
        throw Error(ErrorCode::InvalidConfig, "unknown synth config key " + key);
      }
    }
    c.seed = j.value("seed", c.seed);
    c.machine_count = j.value("machine_count", c.machine_count);
    c.job_count = j.value("job_count", c.job_count);
    c.horizon_seconds = j.value("horizon_seconds", c.horizon_seconds);
    c.usage_resolution_s = j.value("usage_resolution_s", c.usage_resolution_s);
    c.scheduler_resolution_s = j.value("scheduler_resolution_s", c.scheduler_resolution_s);
    c.noise_amplitude = j.value("noise_amplitude", c.noise_amplitude);
    const Json* mix = j.contains("scenario_mix") ? &j.at("scenario_mix") : nullptr;
    bool flat = false;
    for (const auto& name : kScenarioNames) flat = flat || j.contains(name);
    if (mix || flat) {
      c.scenario_mix.clear();
      const Json& src = mix ? *mix : j;
      for (const auto& name : kScenarioNames) {
        if (src.contains(name)) c.scenario_mix[*parse_scenario(name)] = src.at(name).get<std::size_t>();
      }
      if (mix) {
        for (const auto& [key, _] : mix->items()) {
          if (!parse_scenario(key)) throw Error(ErrorCode::InvalidConfig, "unknown scenario " + key);
        }
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad synth config: ") + e.what());
  }
  return c;
}

SyntheticTrace generate_synthetic(const SynthConfig& config) {
  std::size_t anomalous = 0;
  for (const auto& [s, n] : config.scenario_mix) {
    if (s != Scenario::StableLow) anomalous += n;
  }
  validate(config, anomalous);

  const std::int64_t R = config.usage_resolution_s;
  const std::int64_t H = config.horizon_seconds;
  const double noise = config.noise_amplitude;
  const std::size_t stable_jobs =
      config.scenario_mix.count(Scenario::StableLow) ? config.scenario_mix.at(Scenario::StableLow) : 0;

  std::size_t per_anomaly = 0;
  if (anomalous > 0) {
    per_anomaly = std::clamp<std::size_t>(config.machine_count * 3 / (5 * anomalous), 2, 6);
    const std::size_t reserve = stable_jobs > 0 ? 1 : 0;
    if (per_anomaly * anomalous + reserve > config.machine_count) {
      throw Error(ErrorCode::InvalidConfig,
                  "machine_count too small: anomalous jobs need 2 exclusive machines each");
    }
  }

  Rng rng(config.seed);

  std::vector<MachinePlan> machines(config.machine_count);
  for (std::size_t i = 0; i < machines.size(); ++i) {
    auto& m = machines[i];
    m.id = padded_id("m_", i + 1, config.machine_count);
    for (std::size_t k = 0; k < 3; ++k) {
      m.baseline.level[k] = rng.uniform(25.0, 35.0);
      m.baseline.phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    m.baseline.period = rng.uniform(1800.0, 7200.0);
  }

  std::vector<Scenario> order;
  for (const auto& [s, n] : config.scenario_mix) order.insert(order.end(), n, s);
  rng.shuffle(order);

  std::vector<std::size_t> machine_order(config.machine_count);
  for (std::size_t i = 0; i < machine_order.size(); ++i) machine_order[i] = i;
  rng.shuffle(machine_order);
  std::size_t next_exclusive = 0;
  std::vector<std::size_t> pool(machine_order.begin() + static_cast<std::ptrdiff_t>(per_anomaly * anomalous),
                                machine_order.end());
  std::sort(pool.begin(), pool.end());

  SyntheticTrace out;
  auto& bundle = out.bundle;
  auto& tally = out.tally;
  std::vector<AnomalyLabel> labels;

  for (std::size_t j = 0; j < order.size(); ++j) {
    JobPlan job;
    job.job_id = padded_id("j_", j + 1, config.job_count);
    job.scenario = order[j];
    tally.job_scenarios[job.job_id] = job.scenario;

    std::vector<std::vector<std::size_t>> task_machines;
    std::vector<std::optional<Timestamp>> task_ends;

    if (job.scenario == Scenario::StableLow) {
      job.start = align_down(rng.uniform(0.0, static_cast<double>(H) / 2.0), R);
      const auto duration = std::max<Timestamp>(
          R, align_down(rng.uniform(static_cast<double>(H) / 8.0, static_cast<double>(H) / 2.0), R));
      const bool unfinished = rng.chance(0.125);
      if (!unfinished) job.end = std::min(job.start + duration, H);
      const std::size_t tasks = rng.chance(0.75) ? 1 : 2 + rng.index(3);
      for (std::size_t t = 0; t < tasks; ++t) {
        std::vector<std::size_t> chosen = pool;
        rng.shuffle(chosen);
        chosen.resize(std::min<std::size_t>(chosen.size(), 1 + rng.index(6)));
        std::sort(chosen.begin(), chosen.end());
        task_machines.push_back(std::move(chosen));
        if (job.end) {
          // Later tasks finish earlier so end annotations form several clusters.
          const auto span = *job.end - job.start;
          const auto end = job.start + std::max<Timestamp>(R, align_down(
              static_cast<double>(span) * (1.0 - 0.15 * static_cast<double>(t)), R));
          task_ends.push_back(std::min(end, *job.end));
        } else {
          task_ends.push_back(std::nullopt);
        }
      }
    } else {
      const auto duration = align_down(rng.uniform(1200.0, static_cast<double>(kSynthMaxAnomalySeconds)), R);
      const auto latest = H - kSynthTailSeconds - duration;
      job.start = align_down(rng.uniform(static_cast<double>(kSynthLeadSeconds), static_cast<double>(latest)), R);
      job.start = std::max(job.start, ((kSynthLeadSeconds + R - 1) / R) * R);
      job.end = job.start + duration;
      for (std::size_t k = 0; k < per_anomaly; ++k) job.machines.push_back(machine_order[next_exclusive++]);
      std::sort(job.machines.begin(), job.machines.end());
      if (job.machines.size() >= 2 && rng.chance(0.5)) {
        const auto half = job.machines.size() / 2;
        task_machines.emplace_back(job.machines.begin(), job.machines.begin() + static_cast<std::ptrdiff_t>(half));
        task_machines.emplace_back(job.machines.begin() + static_cast<std::ptrdiff_t>(half), job.machines.end());
      } else {
        task_machines.push_back(job.machines);
      }
      task_ends.assign(task_machines.size(), job.end);

      for (auto idx : job.machines) {
        auto& m = machines[idx];
        m.start = job.start;
        m.end = *job.end;
        switch (job.scenario) {
          case Scenario::Spike:
            m.role = Role::Spike;
            break;
          case Scenario::SyncDrop:
            m.role = Role::SyncDrop;
            m.pre_cpu = rng.uniform(74.0, 78.0);
            m.pre_mem = rng.uniform(52.0, 58.0);
            m.low_cpu = rng.uniform(24.0, 28.0);
            break;
          case Scenario::Thrashing:
            m.role = Role::Thrashing;
            m.pre_cpu = rng.uniform(62.0, 68.0);
            m.pre_mem = rng.uniform(72.0, 78.0);
            break;
          case Scenario::StableLow:
            break;
        }
      }

      // One label per unit the detectors report: a sync drop is a job-level
      // event, spikes and thrashing are reported machine by machine.
      AnomalyLabel label;
      label.job_id = job.job_id;
      label.kind = job.scenario == Scenario::Spike      ? AnomalyKind::Spike
                   : job.scenario == Scenario::SyncDrop ? AnomalyKind::SyncDrop
                                                        : AnomalyKind::Thrashing;
      if (label.kind == AnomalyKind::SyncDrop) {
        label.t_start = job.start - R;
        label.t_end = job.start + R;
        for (auto idx : job.machines) label.machine_ids.push_back(machines[idx].id);
        labels.push_back(std::move(label));
      } else {
        label.t_start = job.start;
        label.t_end = *job.end;
        std::vector<std::string> ids;
        for (auto idx : job.machines) ids.push_back(machines[idx].id);
        std::sort(ids.begin(), ids.end());
        for (auto& id : ids) {
          label.machine_ids = {id};
          labels.push_back(label);
        }
      }
    }

    ++tally.jobs;
    if (task_machines.size() == 1) ++tally.single_task_jobs;
    for (std::size_t t = 0; t < task_machines.size(); ++t) {
      TaskRecord task;
      task.job_id = job.job_id;
      task.task_id = t == 0 ? std::string("task_M1")
                            : "task_R" + std::to_string(t + 1) + "_" + std::to_string(t);
      task.create_ts = job.start;
      task.end_ts = task_ends[t];
      task.instance_count = static_cast<std::int64_t>(task_machines[t].size());
      task.status = task.end_ts ? Status::Terminated : Status::Running;
      task.dependencies = t == 0 ? std::vector<std::string>{}
                                 : std::vector<std::string>{t == 1 ? "task_M1" : "task_R" + std::to_string(t)};
      ++tally.tasks;
      if (task_machines[t].size() >= 2) ++tally.multi_instance_tasks;
      for (auto idx : task_machines[t]) {
        InstanceRecord inst;
        inst.job_id = job.job_id;
        inst.task_id = task.task_id;
        inst.machine_id = machines[idx].id;
        inst.start_ts = job.start;
        inst.end_ts = task.end_ts;
        inst.status = task.status;
        bundle.instances.push_back(std::move(inst));
        ++tally.instances;
      }
      bundle.tasks.push_back(std::move(task));
    }
  }

  // Usage: every machine reports at every step.
  for (Timestamp t = 0; t < H; t += R) {
    for (auto& m : machines) {
      auto jitter = [&] { return rng.uniform(-noise, noise); };
      double cpu = m.baseline.at(0, t) + jitter();
      double mem = m.baseline.at(1, t) + jitter();
      const double disk = m.baseline.at(2, t) + jitter();
      switch (m.role) {
        case Role::Idle:
          break;
        case Role::Spike:
          if (t >= m.start && t < m.end) {
            cpu = std::clamp(90.0 + jitter(), 85.0, 100.0);
            mem = std::clamp(90.0 + jitter(), 85.0, 100.0);
          } else if (t >= m.end) {
            // Slow settle back to the baseline after the job ends.
            constexpr std::array kSettle{0.6, 0.35, 0.15};
            const auto step = static_cast<std::size_t>((t - m.end) / R);
            if (step < kSettle.size()) {
              cpu += (90.0 - cpu) * kSettle[step];
              mem += (90.0 - mem) * kSettle[step];
            }
          }
          break;
        case Role::SyncDrop:
          if (t < m.start) {
            cpu = m.pre_cpu + jitter();
            mem = m.pre_mem + jitter();
          } else if (t < m.end) {
            cpu = m.low_cpu + jitter();
          }
          break;
        case Role::Thrashing:
          if (t < m.start) {
            cpu = m.pre_cpu + jitter();
            mem = m.pre_mem + jitter();
          } else if (t < m.end) {
            const double frac = static_cast<double>(t - m.start) /
                                static_cast<double>(std::max<Timestamp>(R, m.end - R - m.start));
            cpu = m.pre_cpu - 35.0 * frac + jitter();
            mem = std::clamp(90.0 + jitter(), 86.0, 100.0);
          } else if (t < m.end + 3 * R) {
            // Memory pressure and residual load outlive the job.
            cpu = 30.0 + jitter();
            mem = std::clamp(90.0 + jitter(), 86.0, 100.0);
          }
          break;
      }
      bundle.usage.push_back({t, m.id, round2(cpu), round2(mem), round2(disk)});
    }
  }

  Manifest stated;
  stated.usage_resolution_s = R;
  stated.scheduler_resolution_s = config.scheduler_resolution_s;
  bundle.manifest = compute_manifest(bundle.usage, bundle.tasks, bundle.instances, &stated);
  bundle.labels = std::move(labels);
  return out;
}

}  // namespace batchlens
