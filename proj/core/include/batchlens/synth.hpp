#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "batchlens/trace.hpp"

namespace batchlens {

enum class Scenario { StableLow, Spike, SyncDrop, Thrashing };

std::string_view to_string(Scenario scenario);
std::optional<Scenario> parse_scenario(std::string_view text);

struct SynthConfig {
  std::uint64_t seed = 7;
  std::size_t machine_count = 50;
  std::size_t job_count = 24;
  std::int64_t horizon_seconds = 7200;
  std::int64_t usage_resolution_s = 60;
  std::int64_t scheduler_resolution_s = 300;
  std::map<Scenario, std::size_t> scenario_mix{{Scenario::StableLow, 15},
                                               {Scenario::Spike, 3},
                                               {Scenario::SyncDrop, 3},
                                               {Scenario::Thrashing, 3}};
  double noise_amplitude = 2.0;  // percentage points
};

/// Reads a flat JSON object; missing keys keep their defaults. The mix is
/// given either as "scenario_mix": {"spike": 3, ...} or as flat keys
/// "stable_low", "spike", "sync_drop", "thrashing".
SynthConfig synth_config_from_json(std::string_view text);

/// Bookkeeping kept by the generator while it emits the tables.
struct SynthTally {
  std::size_t jobs = 0;
  std::size_t single_task_jobs = 0;
  std::size_t tasks = 0;
  std::size_t multi_instance_tasks = 0;
  std::size_t instances = 0;
  std::map<std::string, Scenario> job_scenarios;
};

struct SyntheticTrace {
  TraceBundle bundle;
  SynthTally tally;
};

/// Deterministic for a given config. Anomalous jobs run on machines no other
/// job touches, so their injected signatures stay isolated. Throws
/// Error(InvalidConfig) when the config is inconsistent.
SyntheticTrace generate_synthetic(const SynthConfig& config);

/// Lead time before and settle time after an anomalous job; the horizon must
/// fit lead + longest job + tail whenever the mix has anomalous jobs.
inline constexpr std::int64_t kSynthLeadSeconds = 1800;
inline constexpr std::int64_t kSynthTailSeconds = 1800;
inline constexpr std::int64_t kSynthMaxAnomalySeconds = 1800;

}  // namespace batchlens
