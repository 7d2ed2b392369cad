#pragma once

#include <string>
#include <vector>

#include "batchlens/anomaly.hpp"
#include "batchlens/layout.hpp"
#include "batchlens/store.hpp"
#include "batchlens/timeseries.hpp"

// Stable JSON renderings: fixed key order, shortest round-trip doubles.
namespace batchlens {

std::string to_json(const Manifest& manifest);
std::string to_json(const HierarchySnapshot& snapshot);
std::string to_json(const LayoutTree& layout);
std::string to_json(const Series& series);
std::string to_json(const SeriesBundle& bundle);
std::string to_json(const AggregateSeries& aggregate);
std::string to_json(const std::vector<JobSummary>& jobs);
std::string to_json(const DistributionStats& stats);
std::string to_json(const std::vector<AnomalyEvent>& events);
std::string to_json(const Detection& detection);
std::string to_json(const ValidationReport& report);

/// kind,job_id,t_from,t_to,severity,machines (machines joined by ';').
std::string anomalies_to_csv(const std::vector<AnomalyEvent>& events);

}  // namespace batchlens
