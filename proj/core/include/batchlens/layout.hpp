#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "batchlens/color.hpp"
#include "batchlens/geometry.hpp"
#include "batchlens/store.hpp"

namespace batchlens {

struct MachineNode {
  std::string machine_id;
  std::optional<double> cpu_util;
  std::optional<double> mem_util;
  std::optional<double> disk_util;
};

struct TaskNode {
  std::string task_id;
  std::vector<MachineNode> machines;
};

struct JobNode {
  std::string job_id;
  std::vector<TaskNode> tasks;
};

/// Job -> task -> machine tree of everything active at `timestamp`. A
/// machine serving several (job, task) pairs appears under each of them.
struct HierarchySnapshot {
  Timestamp timestamp = 0;
  bool out_of_range = false;
  std::vector<JobNode> roots;
};

HierarchySnapshot build_snapshot(const TraceStore& store, Timestamp t);

struct AnnulusSpec {
  Metric metric = Metric::Cpu;
  double r_inner_frac = 0.0;
  double r_outer_frac = 0.0;
  Color color;
  std::optional<double> value;
};

/// Equal-width rings: cpu innermost, then mem, then disk.
std::array<AnnulusSpec, 3> annuli_for(const MachineNode& machine);

struct LayoutStyle {
  double machine_radius = 10.0;
  double task_padding = 0.1;
  double job_padding = 0.1;
  double root_spacing = 0.05;
};

enum class NodeKind { Job, Task, Machine };

std::string_view to_string(NodeKind kind);

struct LayoutNode {
  std::string id;
  NodeKind kind = NodeKind::Job;
  Circle circle;
  std::vector<AnnulusSpec> annuli;  // machines only
  std::vector<LayoutNode> children;
};

struct LayoutTree {
  Timestamp timestamp = 0;
  bool out_of_range = false;
  Circle bounds;  // encloses every root; centered on the origin
  std::vector<LayoutNode> roots;
};

/// Throws Error(InvalidArgument) unless every style value is positive.
LayoutTree layout_snapshot(const HierarchySnapshot& snapshot, const LayoutStyle& style);

}  // namespace batchlens
