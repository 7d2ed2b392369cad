#pragma once

#include <atomic>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "batchlens/anomaly.hpp"
#include "batchlens/store.hpp"

namespace batchlens {

struct ServiceConfig {
  std::string bind_address = "127.0.0.1:8080";
  std::string bundle_path = ".";
  DetectorConfig detector_config;
  std::size_t default_downsample_points = 500;
  std::optional<std::string> cors_allowed_origin;

  void validate() const;
};

/// Parses the flat key/value JSON config. Unknown keys are rejected.
ServiceConfig service_config_from_json(std::string_view text);

/// Applies BATCHLENS_ADDR, BATCHLENS_BUNDLE and BATCHLENS_POINTS. `getenv`
/// is injectable for tests.
void apply_env_overrides(ServiceConfig& config,
                         const char* (*getenv_fn)(const char*) = nullptr);

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

using QueryParams = std::map<std::string, std::string>;

/// Routes GET requests against an immutable store. Thread-safe: handle()
/// touches no mutable shared state.
class ApiHandler {
 public:
  ApiHandler(std::shared_ptr<const TraceStore> store, ServiceConfig config);

  HttpResponse handle(std::string_view path, const QueryParams& params) const;

  const ServiceConfig& config() const noexcept { return config_; }

 private:
  std::shared_ptr<const TraceStore> store_;
  ServiceConfig config_;
};

/// JSON error body {"error": {"status", "code", "message"}}.
HttpResponse api_error(int status, std::string_view code, std::string_view message);

/// Blocking HTTP server around an ApiHandler. stop() may be called from any
/// thread.
class HttpService {
 public:
  explicit HttpService(std::shared_ptr<const ApiHandler> handler);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds host:port (port 0 picks a free port). Returns the bound port;
  /// throws Error(InvalidConfig) on failure.
  int bind(const std::string& address);
  /// Serves until stop(). Call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace batchlens
