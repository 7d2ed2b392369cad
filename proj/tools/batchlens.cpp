// batchlens: ingest, serve, report and synthesize cluster traces.

#include <CLI11.hpp>

#include <pthread.h>

#include <charconv>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "batchlens/anomaly.hpp"
#include "batchlens/api.hpp"
#include "batchlens/ingest.hpp"
#include "batchlens/serialize.hpp"
#include "batchlens/store.hpp"
#include "batchlens/synth.hpp"

namespace fs = std::filesystem;
using namespace batchlens;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Unreadable, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::Unreadable, "cannot write " + path.string());
}

int run_ingest(const std::string& path, bool strict) {
  try {
    auto [bundle, report] = load_bundle(path);
    std::cout << report.summary();
    write_manifest(bundle.manifest, path);
    std::cout << "manifest written to " << (fs::path(path) / "manifest.json").string() << '\n';
    return strict && !report.errors.empty() ? kExitValidation : kExitOk;
  } catch (const IngestError& e) {
    std::cerr << e.report().summary() << "fatal: " << e.what() << '\n';
    return kExitValidation;
  }
}

int run_serve(const std::string& config_path, const std::string& bundle, const std::string& addr, int points) {
  ServiceConfig config;
  if (!config_path.empty()) config = service_config_from_json(slurp(config_path));
  apply_env_overrides(config);
  if (!bundle.empty()) config.bundle_path = bundle;
  if (!addr.empty()) config.bind_address = addr;
  if (points > 0) config.default_downsample_points = static_cast<std::size_t>(points);
  config.validate();

  std::shared_ptr<const TraceStore> store;
  try {
    auto [loaded, report] = load_bundle(config.bundle_path);
    std::cerr << report.summary();
    store = std::make_shared<const TraceStore>(build_store(loaded));
  } catch (const IngestError& e) {
    std::cerr << e.report().summary() << "fatal: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return kExitValidation;
  }

  // SIGINT/SIGTERM are blocked before the server spawns its workers and
  // picked up by a dedicated thread, which shuts the listener down.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  auto handler = std::make_shared<const ApiHandler>(store, config);
  HttpService service(handler);
  const int port = service.bind(config.bind_address);
  std::cerr << "serving " << config.bundle_path << " on port " << port << '\n';
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    service.stop();
  });
  service.listen();
  if (waiter.joinable()) {
    // listen() may also return on its own; wake the waiter so it can exit.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  return kExitOk;
}

int run_report(const std::string& path, std::optional<Timestamp> from, std::optional<Timestamp> to,
               const std::string& out_dir, const std::string& config_path) {
  ServiceConfig config;
  if (!config_path.empty()) config = service_config_from_json(slurp(config_path));
  try {
    auto [bundle, report] = load_bundle(path);
    const auto store = build_store(bundle);
    const auto h = store.horizon();
    const TimeWindow window(from.value_or(h.t_from()), to.value_or(h.t_to()));
    const auto detection = scan_window(store, window, config.detector_config);

    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "anomalies.csv", anomalies_to_csv(detection.events));
    write_text(fs::path(out_dir) / "anomalies.json", to_json(detection) + "\n");

    std::ostringstream summary;
    const auto stats = store.distribution_stats();
    summary << "bundle: " << path << '\n'
            << "window: [" << window.t_from() << ", " << window.t_to() << ")\n"
            << "machines: " << stats.machine_count << '\n'
            << "jobs: " << stats.job_count << '\n'
            << "single-task jobs: " << stats.fraction_single_task_jobs * 100.0 << "%\n"
            << "multi-instance tasks: " << stats.fraction_multi_instance_tasks * 100.0 << "%\n"
            << "anomalies: " << detection.events.size() << '\n';
    std::map<std::string, std::size_t> by_kind;
    for (const auto& e : detection.events) ++by_kind[std::string(to_string(e.kind))];
    for (const auto& [kind, n] : by_kind) summary << "  " << kind << ": " << n << '\n';
    write_text(fs::path(out_dir) / "summary.txt", summary.str());
    std::cout << summary.str();
    return kExitOk;
  } catch (const IngestError& e) {
    std::cerr << e.report().summary() << "fatal: " << e.what() << '\n';
    return kExitValidation;
  }
}

int run_synth(const std::string& config_path, const std::string& out_dir, const SynthConfig& overrides,
              const CLI::App& cmd) {
  SynthConfig config = config_path.empty() ? SynthConfig{} : synth_config_from_json(slurp(config_path));
  if (cmd.count("--seed")) config.seed = overrides.seed;
  if (cmd.count("--machines")) config.machine_count = overrides.machine_count;
  if (cmd.count("--jobs")) config.job_count = overrides.job_count;
  if (cmd.count("--horizon")) config.horizon_seconds = overrides.horizon_seconds;
  if (cmd.count("--resolution")) config.usage_resolution_s = overrides.usage_resolution_s;
  if (cmd.count("--noise")) config.noise_amplitude = overrides.noise_amplitude;
  if (cmd.count("--mix")) config.scenario_mix = overrides.scenario_mix;
  const auto trace = generate_synthetic(config);
  write_bundle(trace.bundle, out_dir);
  std::cout << "wrote " << trace.bundle.usage.size() << " usage rows, " << trace.bundle.tasks.size()
            << " tasks, " << trace.bundle.instances.size() << " instances, "
            << trace.bundle.labels->size() << " labels to " << out_dir << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch-job cluster trace analytics"};
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "Validate a trace bundle and write its manifest");
  std::string ingest_path;
  bool strict = false;
  ingest->add_option("path", ingest_path, "Bundle directory")->required();
  ingest->add_flag("--strict", strict, "Exit 1 when any row was rejected");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP JSON API");
  std::string serve_config, serve_bundle, serve_addr;
  int serve_points = 0;
  serve->add_option("--config", serve_config, "Flat JSON config file");
  serve->add_option("--bundle", serve_bundle, "Bundle directory");
  serve->add_option("--addr", serve_addr, "host:port to bind");
  serve->add_option("--points", serve_points, "Default downsample points")->check(CLI::Range(2, 1 << 30));

  auto* report = app.add_subcommand("report", "Scan a window for anomalies and write CSV/JSON/text");
  std::string report_path, report_out = "report", report_config;
  std::optional<Timestamp> report_from, report_to;
  report->add_option("path", report_path, "Bundle directory")->required();
  report->add_option("--from", report_from, "Window start (trace seconds)");
  report->add_option("--to", report_to, "Window end, exclusive");
  report->add_option("--out", report_out, "Output directory")->capture_default_str();
  report->add_option("--config", report_config, "Flat JSON config with detector thresholds");

  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic bundle");
  std::string synth_config, synth_out;
  SynthConfig overrides;
  std::vector<std::string> mix;
  synth->add_option("--config", synth_config, "JSON synth config");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", overrides.seed, "RNG seed");
  synth->add_option("--machines", overrides.machine_count, "Machine count");
  synth->add_option("--jobs", overrides.job_count, "Job count");
  synth->add_option("--horizon", overrides.horizon_seconds, "Horizon in seconds");
  synth->add_option("--resolution", overrides.usage_resolution_s, "Usage resolution in seconds");
  synth->add_option("--noise", overrides.noise_amplitude, "Noise amplitude (percentage points)");
  synth->add_option("--mix", mix, "Scenario mix, e.g. --mix stable_low=15,spike=3")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest) return run_ingest(ingest_path, strict);
    if (*serve) return run_serve(serve_config, serve_bundle, serve_addr, serve_points);
    if (*report) return run_report(report_path, report_from, report_to, report_out, report_config);
    if (*synth) {
      if (synth->count("--mix")) {
        overrides.scenario_mix.clear();
        for (const auto& item : mix) {
          const auto eq = item.find('=');
          const auto s = parse_scenario(item.substr(0, eq));
          std::size_t n = 0;
          const bool counted = eq != std::string::npos &&
                               std::from_chars(item.data() + eq + 1, item.data() + item.size(), n).ec == std::errc{};
          if (!s || !counted) {
            std::cerr << "bad --mix entry '" << item << "', expected scenario=count\n";
            return kExitUsage;
          }
          overrides.scenario_mix[*s] = n;
        }
      }
      return run_synth(synth_config, synth_out, overrides, *synth);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::InvalidArgument ? kExitUsage
                                                                                          : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}
