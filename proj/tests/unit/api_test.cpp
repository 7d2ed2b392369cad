#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <cstring>
#include <thread>

#include "batchlens/api.hpp"
#include "batchlens/synth.hpp"
#include "test_support.hpp"

using namespace batchlens;
using nlohmann::json;

namespace {

std::shared_ptr<const TraceStore> shared_store() {
  static const auto store = std::make_shared<const TraceStore>(build_store(generate_synthetic(SynthConfig{}).bundle));
  return store;
}

ApiHandler make_handler() { return ApiHandler(shared_store(), ServiceConfig{}); }

json body_of(const HttpResponse& r) { return json::parse(r.body); }

}  // namespace

TEST_CASE("healthz and manifest") {
  const auto h = make_handler();
  const auto r = h.handle("/healthz", {});
  CHECK(r.status == 200);
  CHECK(r.content_type == "application/json");
  const auto j = body_of(r);
  CHECK(j["status"] == "ok");
  CHECK(j["manifest"]["machine_count"] == 50);
  CHECK(body_of(h.handle("/manifest", {}))["horizon_seconds"] == 7200);
}

TEST_CASE("parameter errors map to 400, unknown entities to 404") {
  const auto h = make_handler();
  const auto bad = h.handle("/snapshot", {{"t", "abc"}});
  CHECK(bad.status == 400);
  CHECK(body_of(bad)["error"]["code"] == "INVALID_PARAM");
  CHECK(h.handle("/snapshot", {}).status == 400);
  CHECK(h.handle("/timeline", {{"metric", "gpu"}}).status == 400);
  CHECK(h.handle("/jobs/j_01/series", {{"points", "1"}}).status == 400);

  const auto missing = h.handle("/jobs/nonexistent/series", {{"metric", "cpu"}});
  CHECK(missing.status == 404);
  CHECK(body_of(missing)["error"]["code"] == "NOT_FOUND");
  CHECK(h.handle("/machines/zz/series", {}).status == 404);
  CHECK(h.handle("/nowhere", {}).status == 404);

  CHECK(h.handle("/timeline", {{"resolution", "1"}}).status == 422);
  CHECK(h.handle("/anomalies", {{"from", "100"}, {"to", "50"}}).status == 422);
  CHECK(h.handle("/layout", {{"t", "0"}, {"machine_radius", "-1"}}).status == 422);
}

TEST_CASE("every endpoint answers with the documented shape") {
  const auto h = make_handler();
  const auto timeline = body_of(h.handle("/timeline", {{"metric", "mem"}}));
  CHECK(timeline["resolution_s"] == 300);
  CHECK(timeline["points"].size() == 24);

  const auto snap = body_of(h.handle("/snapshot", {{"t", "3600"}}));
  CHECK(snap["timestamp"] == 3600);
  CHECK(snap["out_of_range"] == false);
  CHECK(snap["roots"].size() == shared_store()->active_jobs_at(3600).value.size());
  CHECK(body_of(h.handle("/snapshot", {{"t", "99999"}}))["out_of_range"] == true);

  const auto layout = body_of(h.handle("/layout", {{"t", "3600"}, {"machine_radius", "4"}}));
  CHECK(layout["bounds"].contains("r"));
  const auto& machine = layout["roots"][0]["children"][0]["children"][0];
  CHECK(machine["kind"] == "machine");
  CHECK(machine["r"] == 4.0);
  CHECK(machine["annuli"].size() == 3);

  const auto jobs = body_of(h.handle("/jobs", {}));
  CHECK(jobs.size() == 24);
  CHECK(jobs[0].contains("machine_set"));

  const auto series = body_of(h.handle("/jobs/j_01/series", {{"metric", "cpu"}, {"points", "10"}}));
  CHECK(series["job_id"] == "j_01");
  for (const auto& s : series["series"]) CHECK(s["points"].size() <= 10);
  CHECK(series.contains("annotations"));
  CHECK(series.contains("task_color_index"));

  const auto ms = body_of(h.handle("/machines/m_01/series", {{"from", "0"}, {"to", "600"}}));
  CHECK(ms["points"].size() == 10);
  CHECK(ms["points"][0][0] == 0);

  const auto links = body_of(h.handle("/links", {{"t", "3600"}}));
  CHECK(links["links"].size() == shared_store()->multi_job_machines_at(3600).value.size());

  const auto anomalies = body_of(h.handle("/anomalies", {}));
  CHECK(anomalies["events"].size() > 0);
  CHECK(anomalies["events"][0].contains("interval"));
}

TEST_CASE("responses are byte-identical across calls and threads") {
  const auto h = make_handler();
  const std::vector<std::pair<std::string, QueryParams>> requests{
      {"/healthz", {}},
      {"/timeline", {{"metric", "disk"}}},
      {"/layout", {{"t", "3000"}}},
      {"/jobs", {}},
      {"/jobs/j_03/series", {{"metric", "mem"}}},
      {"/links", {{"t", "2400"}}},
      {"/anomalies", {{"from", "0"}, {"to", "7200"}}}};
  std::vector<std::string> expected;
  for (const auto& [path, q] : requests) expected.push_back(h.handle(path, q).body);

  std::atomic<int> mismatches{0};
  std::vector<std::jthread> workers;
  for (int w = 0; w < 8; ++w) {
    workers.emplace_back([&, w] {
      for (int i = 0; i < 20; ++i) {
        const auto k = static_cast<std::size_t>(w + i) % requests.size();
        if (h.handle(requests[k].first, requests[k].second).body != expected[k]) ++mismatches;
      }
    });
  }
  workers.clear();
  CHECK(mismatches == 0);
}

TEST_CASE("config parsing, validation and environment overrides") {
  const auto cfg = service_config_from_json(
      R"({"bind_address": "0.0.0.0:9000", "bundle_path": "/data", "default_downsample_points": 100,
          "spike_min_rise_points": 30, "sync_drop_machine_fraction": 0.5, "cors_allowed_origin": "*"})");
  CHECK(cfg.bind_address == "0.0.0.0:9000");
  CHECK(cfg.default_downsample_points == 100);
  CHECK(cfg.detector_config.spike.min_rise_points == 30);
  CHECK(cfg.detector_config.sync_drop.machine_fraction == 0.5);
  CHECK(cfg.cors_allowed_origin == "*");
  CHECK_THROWS_AS(service_config_from_json(R"({"mystery": 1})"), Error);
  CHECK_THROWS_AS(service_config_from_json(R"({"default_downsample_points": 1})"), Error);

  auto env = [](const char* name) -> const char* {
    if (std::strcmp(name, "BATCHLENS_ADDR") == 0) return "127.0.0.1:1234";
    if (std::strcmp(name, "BATCHLENS_POINTS") == 0) return "42";
    return nullptr;
  };
  auto overridden = cfg;
  apply_env_overrides(overridden, env);
  CHECK(overridden.bind_address == "127.0.0.1:1234");
  CHECK(overridden.default_downsample_points == 42);
  CHECK(overridden.bundle_path == "/data");
}

TEST_CASE("live HTTP service") {
  ServiceConfig cfg;
  cfg.cors_allowed_origin = "http://localhost:5173";
  auto handler = std::make_shared<const ApiHandler>(shared_store(), cfg);
  HttpService service(handler);
  const int port = service.bind("127.0.0.1:0");
  REQUIRE(port > 0);
  std::jthread server([&] { service.listen(); });

  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  httplib::Result r;
  for (int attempt = 0; attempt < 50 && !(r = client.Get("/healthz")); ++attempt) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
  CHECK(json::parse(r->body)["status"] == "ok");

  const auto bad = client.Get("/snapshot?t=abc");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  const auto series = client.Get("/jobs/j_02/series?metric=mem&points=5");
  REQUIRE(series);
  CHECK(series->status == 200);
  CHECK(series->body == handler->handle("/jobs/j_02/series", {{"metric", "mem"}, {"points", "5"}}).body);

  service.stop();
}
