#include "batchlens/layout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "batchlens/error.hpp"

namespace batchlens {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Job: return "job";
    case NodeKind::Task: return "task";
    case NodeKind::Machine: return "machine";
  }
  return "job";
}

HierarchySnapshot build_snapshot(const TraceStore& store, Timestamp t) {
  HierarchySnapshot snap;
  snap.timestamp = t;
  if (!store.horizon().contains(t)) {
    snap.out_of_range = true;
    return snap;
  }
  // job -> task -> machines, all ordered by id.
  std::map<std::string, std::map<std::string, std::set<std::string>>> tree;
  const auto instances = store.instances();
  for (auto i : store.started_by(t)) {
    const auto& inst = instances[i];
    if (inst.active_at(t)) tree[inst.job_id][inst.task_id].insert(inst.machine_id);
  }
  for (const auto& [job_id, tasks] : tree) {
    JobNode job{job_id, {}};
    for (const auto& [task_id, machines] : tasks) {
      TaskNode task{task_id, {}};
      for (const auto& machine_id : machines) {
        MachineNode node{machine_id, std::nullopt, std::nullopt, std::nullopt};
        if (const auto sample = store.sample_at(machine_id, t)) {
          node.cpu_util = sample->cpu;
          node.mem_util = sample->mem;
          node.disk_util = sample->disk;
        }
        task.machines.push_back(std::move(node));
      }
      job.tasks.push_back(std::move(task));
    }
    snap.roots.push_back(std::move(job));
  }
  return snap;
}

std::array<AnnulusSpec, 3> annuli_for(const MachineNode& machine) {
  auto ring = [](Metric metric, double inner, double outer, std::optional<double> value) {
    return AnnulusSpec{metric, inner, outer, color_for(value), value};
  };
  return {ring(Metric::Cpu, 0.0, 1.0 / 3.0, machine.cpu_util),
          ring(Metric::Mem, 1.0 / 3.0, 2.0 / 3.0, machine.mem_util),
          ring(Metric::Disk, 2.0 / 3.0, 1.0, machine.disk_util)};
}

namespace {

void translate(LayoutNode& node, double dx, double dy) {
  node.circle.cx += dx;
  node.circle.cy += dy;
  for (auto& child : node.children) translate(child, dx, dy);
}

// Packs already sized children (positioned around their own origin) and
// returns the parent circle centered on the origin. `pack_scale` inflates the
// radii used for packing only, leaving a gap between siblings.
Circle arrange(std::vector<LayoutNode>& children, double padding, double pack_scale) {
  std::vector<std::size_t> order(children.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (children[a].circle.r != children[b].circle.r) return children[a].circle.r > children[b].circle.r;
    return children[a].id < children[b].id;
  });
  std::vector<double> radii;
  radii.reserve(order.size());
  for (auto i : order) radii.push_back(children[i].circle.r * pack_scale);
  const auto placed = pack_siblings(radii);

  std::vector<Circle> actual;
  actual.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& child = children[order[k]];
    translate(child, placed[k].cx - child.circle.cx, placed[k].cy - child.circle.cy);
    actual.push_back(child.circle);
  }
  const Circle enclosing = enclosing_circle(actual);
  for (auto& child : children) translate(child, -enclosing.cx, -enclosing.cy);
  return {0.0, 0.0, enclosing.r * (1.0 + padding)};
}

}  // namespace

LayoutTree layout_snapshot(const HierarchySnapshot& snapshot, const LayoutStyle& style) {
  for (double v : {style.machine_radius, style.task_padding, style.job_padding, style.root_spacing}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "layout style values must be positive");
    }
  }
  LayoutTree tree;
  tree.timestamp = snapshot.timestamp;
  tree.out_of_range = snapshot.out_of_range;

  for (const auto& job : snapshot.roots) {
    LayoutNode job_node{job.job_id, NodeKind::Job, {}, {}, {}};
    for (const auto& task : job.tasks) {
      LayoutNode task_node{task.task_id, NodeKind::Task, {}, {}, {}};
      for (const auto& machine : task.machines) {
        const auto rings = annuli_for(machine);
        task_node.children.push_back(LayoutNode{machine.machine_id, NodeKind::Machine,
                                                {0.0, 0.0, style.machine_radius},
                                                {rings.begin(), rings.end()},
                                                {}});
      }
      if (!task_node.children.empty()) {
        task_node.circle = arrange(task_node.children, style.task_padding, 1.0);
      } else {
        task_node.circle = {0.0, 0.0, style.machine_radius * (1.0 + style.task_padding)};
      }
      job_node.children.push_back(std::move(task_node));
    }
    if (!job_node.children.empty()) {
      job_node.circle = arrange(job_node.children, style.job_padding, 1.0);
    } else {
      job_node.circle = {0.0, 0.0, style.machine_radius * (1.0 + style.job_padding)};
    }
    tree.roots.push_back(std::move(job_node));
  }

  if (!tree.roots.empty()) {
    tree.bounds = arrange(tree.roots, 0.0, 1.0 + style.root_spacing);
  }
  return tree;
}

}  // namespace batchlens
