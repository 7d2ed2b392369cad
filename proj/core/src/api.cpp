#include "batchlens/api.hpp"

#include <cstdlib>
#include <httplib.h>

#include "batchlens/error.hpp"
#include "batchlens/ingest.hpp"
#include "batchlens/layout.hpp"
#include "batchlens/serialize.hpp"
#include "batchlens/timeseries.hpp"
#include "json_util.hpp"
#include "text_util.hpp"

namespace batchlens {

using detail::Json;

void ServiceConfig::validate() const {
  if (default_downsample_points < 2) {
    throw Error(ErrorCode::InvalidConfig, "default_downsample_points must be at least 2");
  }
  detector_config.validate();
}

ServiceConfig service_config_from_json(std::string_view text) {
  ServiceConfig c;
  try {
    const auto j = Json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    auto& d = c.detector_config;
    for (const auto& [key, value] : j.items()) {
      if (key == "bind_address") c.bind_address = value.get<std::string>();
      else if (key == "bundle_path") c.bundle_path = value.get<std::string>();
      else if (key == "default_downsample_points") c.default_downsample_points = value.get<std::size_t>();
      else if (key == "cors_allowed_origin") {
        if (value.is_null()) c.cors_allowed_origin.reset();
        else c.cors_allowed_origin = value.get<std::string>();
      }
      else if (key == "spike_baseline_window_s") d.spike.baseline_window_s = value.get<std::int64_t>();
      else if (key == "spike_min_rise_points") d.spike.min_rise_points = value.get<double>();
      else if (key == "spike_min_abs_level") d.spike.min_abs_level = value.get<double>();
      else if (key == "sync_drop_machine_fraction") d.sync_drop.machine_fraction = value.get<double>();
      else if (key == "sync_drop_min_drop_points") d.sync_drop.min_drop_points = value.get<double>();
      else if (key == "sync_drop_max_lag_steps") d.sync_drop.max_lag_steps = value.get<std::int64_t>();
      else if (key == "thrashing_mem_floor") d.thrashing.mem_floor = value.get<double>();
      else if (key == "thrashing_cpu_decline_points") d.thrashing.cpu_decline_points = value.get<double>();
      else if (key == "thrashing_persist_steps_after_end") d.thrashing.persist_steps_after_end = value.get<std::int64_t>();
      else if (key == "thrashing_min_duration_s") d.thrashing.min_duration_s = value.get<std::int64_t>();
      else throw Error(ErrorCode::InvalidConfig, "unknown config key " + key);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad service config: ") + e.what());
  }
  c.validate();
  return c;
}

void apply_env_overrides(ServiceConfig& config, const char* (*getenv_fn)(const char*)) {
  auto get = [getenv_fn](const char* name) -> const char* {
    return getenv_fn ? getenv_fn(name) : std::getenv(name);
  };
  if (const char* v = get("BATCHLENS_ADDR"); v && *v) config.bind_address = v;
  if (const char* v = get("BATCHLENS_BUNDLE"); v && *v) config.bundle_path = v;
  if (const char* v = get("BATCHLENS_POINTS"); v && *v) {
    const auto n = detail::parse_int(v);
    if (!n || *n < 2) throw Error(ErrorCode::InvalidConfig, "BATCHLENS_POINTS must be an integer >= 2");
    config.default_downsample_points = static_cast<std::size_t>(*n);
  }
}

HttpResponse api_error(int status, std::string_view code, std::string_view message) {
  Json j;
  j["error"] = {{"status", status}, {"code", code}, {"message", message}};
  return {status, j.dump(), "application/json"};
}

namespace {

// Signals a 400 with INVALID_PARAM.
struct BadParam {
  std::string message;
};

class Params {
 public:
  explicit Params(const QueryParams& p) : p_(p) {}

  std::optional<std::int64_t> integer(const std::string& name) const {
    const auto it = p_.find(name);
    if (it == p_.end()) return std::nullopt;
    const auto v = detail::parse_int(it->second);
    if (!v) throw BadParam{name + " must be an integer, got '" + it->second + "'"};
    return v;
  }

  std::int64_t required_integer(const std::string& name) const {
    const auto v = integer(name);
    if (!v) throw BadParam{"missing required parameter " + name};
    return *v;
  }

  std::optional<double> number(const std::string& name) const {
    const auto it = p_.find(name);
    if (it == p_.end()) return std::nullopt;
    const auto v = detail::parse_double(it->second);
    if (!v) throw BadParam{name + " must be a number, got '" + it->second + "'"};
    return v;
  }

  Metric metric() const {
    const auto it = p_.find("metric");
    if (it == p_.end()) return Metric::Cpu;
    const auto m = parse_metric(it->second);
    if (!m) throw BadParam{"metric must be cpu, mem or disk"};
    return *m;
  }

 private:
  const QueryParams& p_;
};

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  for (auto part : detail::split(path, '/')) {
    if (!part.empty()) parts.emplace_back(part);
  }
  return parts;
}

HttpResponse ok(std::string body) { return {200, std::move(body), "application/json"}; }

}  // namespace

ApiHandler::ApiHandler(std::shared_ptr<const TraceStore> store, ServiceConfig config)
    : store_(std::move(store)), config_(std::move(config)) {
  config_.validate();
}

HttpResponse ApiHandler::handle(std::string_view path, const QueryParams& query) const {
  const auto& store = *store_;
  const Params params(query);
  const auto parts = split_path(path);

  auto window_from_params = [&]() {
    const auto h = store.horizon();
    const auto from = params.integer("from").value_or(h.t_from());
    const auto to = params.integer("to").value_or(h.t_to());
    if (from >= to) throw Error(ErrorCode::InvalidArgument, "from must be smaller than to");
    return TimeWindow(from, to);
  };
  auto points_param = [&]() {
    const auto points = params.integer("points").value_or(static_cast<std::int64_t>(config_.default_downsample_points));
    if (points < 2) throw BadParam{"points must be at least 2"};
    return static_cast<std::size_t>(points);
  };

  try {
    if (parts.size() == 1 && parts[0] == "healthz") {
      Json j;
      j["status"] = "ok";
      j["manifest"] = Json::parse(to_json(store.manifest()));
      return ok(j.dump());
    }
    if (parts.size() == 1 && parts[0] == "manifest") return ok(to_json(store.manifest()));
    if (parts.size() == 1 && parts[0] == "timeline") {
      const auto metric = params.metric();
      const auto resolution = params.integer("resolution").value_or(
          std::max(store.usage_resolution(), store.manifest().scheduler_resolution_s));
      return ok(to_json(cluster_timeline(store, metric, resolution)));
    }
    if (parts.size() == 1 && parts[0] == "snapshot") {
      return ok(to_json(build_snapshot(store, params.required_integer("t"))));
    }
    if (parts.size() == 1 && parts[0] == "layout") {
      const auto t = params.required_integer("t");
      LayoutStyle style;
      style.machine_radius = params.number("machine_radius").value_or(style.machine_radius);
      style.task_padding = params.number("task_padding").value_or(style.task_padding);
      style.job_padding = params.number("job_padding").value_or(style.job_padding);
      style.root_spacing = params.number("root_spacing").value_or(style.root_spacing);
      return ok(to_json(layout_snapshot(build_snapshot(store, t), style)));
    }
    if (parts.size() == 1 && parts[0] == "jobs") {
      std::vector<JobSummary> jobs;
      for (const auto& [_, j] : store.jobs()) jobs.push_back(j);
      return ok(to_json(jobs));
    }
    if (parts.size() == 3 && parts[0] == "jobs" && parts[2] == "series") {
      if (!store.has_job(parts[1])) return api_error(404, "NOT_FOUND", "unknown job " + parts[1]);
      const auto metric = params.metric();
      const auto points = points_param();
      auto bundle = job_series_bundle(store, parts[1], metric, window_from_params());
      for (auto& s : bundle.series) s = downsample(s, points);
      return ok(to_json(bundle));
    }
    if (parts.size() == 3 && parts[0] == "machines" && parts[2] == "series") {
      if (!store.has_machine(parts[1])) return api_error(404, "NOT_FOUND", "unknown machine " + parts[1]);
      const auto metric = params.metric();
      const auto points = points_param();
      return ok(to_json(downsample(machine_series(store, parts[1], metric, window_from_params()), points)));
    }
    if (parts.size() == 1 && parts[0] == "links") {
      const auto t = params.required_integer("t");
      const auto links = store.multi_job_machines_at(t);
      Json j;
      j["timestamp"] = t;
      j["out_of_range"] = links.out_of_range;
      Json map = Json::object();
      for (const auto& [machine, jobs] : links.value) map[machine] = jobs;
      j["links"] = std::move(map);
      return ok(j.dump());
    }
    if (parts.size() == 1 && parts[0] == "anomalies") {
      return ok(to_json(scan_window(store, window_from_params(), config_.detector_config)));
    }
    return api_error(404, "NOT_FOUND", "no route for " + std::string(path));
  } catch (const BadParam& e) {
    return api_error(400, "INVALID_PARAM", e.message);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::NotFound: return api_error(404, "NOT_FOUND", e.what());
      case ErrorCode::InvalidArgument:
      case ErrorCode::OutOfRange:
      case ErrorCode::NotApplicable:
      case ErrorCode::InvalidConfig: return api_error(422, to_string(e.code()), e.what());
      default: return api_error(500, to_string(e.code()), e.what());
    }
  } catch (const std::exception& e) {
    return api_error(500, "INTERNAL", e.what());
  }
}

struct HttpService::Impl {
  std::shared_ptr<const ApiHandler> handler;
  httplib::Server server;
};

HttpService::HttpService(std::shared_ptr<const ApiHandler> handler) : impl_(std::make_unique<Impl>()) {
  impl_->handler = std::move(handler);
  auto* impl = impl_.get();
  impl_->server.Get(".*", [impl](const httplib::Request& req, httplib::Response& res) {
    QueryParams params;
    for (const auto& [k, v] : req.params) params.try_emplace(k, v);
    const auto r = impl->handler->handle(req.path, params);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
    if (const auto& origin = impl->handler->config().cors_allowed_origin) {
      res.set_header("Access-Control-Allow-Origin", *origin);
    }
  });
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "bind address must be host:port");
  const auto host = address.substr(0, colon);
  const auto port = detail::parse_int(address.substr(colon + 1));
  if (!port || *port < 0 || *port > 65535) throw Error(ErrorCode::InvalidConfig, "bad port in " + address);
  int bound = 0;
  if (*port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, static_cast<int>(*port))) {
    bound = static_cast<int>(*port);
  } else {
    bound = -1;
  }
  if (bound <= 0) throw Error(ErrorCode::InvalidConfig, "cannot bind " + address);
  return bound;
}

void HttpService::listen() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace batchlens
