#include <doctest.h>

#include <functional>
#include <random>

#include "batchlens/color.hpp"
#include "batchlens/layout.hpp"
#include "batchlens/synth.hpp"
#include "test_support.hpp"

using namespace batchlens;

namespace {

void check_layout(const std::vector<LayoutNode>& siblings, const LayoutNode* parent, std::size_t& checked) {
  for (std::size_t i = 0; i < siblings.size(); ++i) {
    const auto& a = siblings[i].circle;
    if (parent) {
      const auto& p = parent->circle;
      CHECK(std::hypot(a.cx - p.cx, a.cy - p.cy) + a.r <= p.r + 1e-6);
    }
    for (std::size_t j = i + 1; j < siblings.size(); ++j) {
      const auto& b = siblings[j].circle;
      CHECK(a.r + b.r - std::hypot(a.cx - b.cx, a.cy - b.cy) <= 1e-6 * (a.r + b.r));
    }
    ++checked;
    check_layout(siblings[i].children, &siblings[i], checked);
  }
}

}  // namespace

TEST_CASE("color anchors and midpoint") {
  CHECK(color_for(0.0).hex() == "#2C7BB6");
  CHECK(color_for(50.0).hex() == "#FFFFBF");
  CHECK(color_for(100.0).hex() == "#D7191C");
  CHECK(color_for(25.0).hex() == "#96BDBB");
  CHECK(color_for(std::nullopt).hex() == "#BDBDBD");
  CHECK(Color::from_hex("#96BDBB") == Color{0x96, 0xBD, 0xBB});
  CHECK_FALSE(Color::from_hex("96BDBB").has_value());
}

TEST_CASE("color channels move monotonically within each segment") {
  for (auto [lo, hi] : {std::pair{0.0, 50.0}, std::pair{50.0, 100.0}}) {
    const Color a = color_for(lo), b = color_for(hi);
    Color prev = a;
    for (double v = lo; v <= hi; v += 0.25) {
      const Color c = color_for(v);
      auto toward = [](int p, int cur, int target) { return target >= p ? cur >= p : cur <= p; };
      CHECK(toward(prev.r, c.r, b.r));
      CHECK(toward(prev.g, c.g, b.g));
      CHECK(toward(prev.b, c.b, b.b));
      prev = c;
    }
  }
}

TEST_CASE("annuli assignment") {
  const auto zero = annuli_for({"m", 0.0, 0.0, 0.0});
  for (const auto& a : zero) CHECK(a.color.hex() == "#2C7BB6");
  CHECK(zero[0].metric == Metric::Cpu);
  CHECK(zero[0].r_inner_frac == 0.0);
  CHECK(zero[1].r_inner_frac == doctest::Approx(1.0 / 3));
  CHECK(zero[2].r_outer_frac == 1.0);
  const auto partial = annuli_for({"m", 100.0, std::nullopt, 50.0});
  CHECK(partial[0].color.hex() == "#D7191C");
  CHECK(partial[1].color.hex() == "#BDBDBD");
  CHECK_FALSE(partial[1].value.has_value());
}

TEST_CASE("one machine under one task under one job") {
  HierarchySnapshot snap;
  snap.roots = {{"j", {{"t", {{"m", 10.0, 20.0, 30.0}}}}}};
  const auto tree = layout_snapshot(snap, LayoutStyle{});
  REQUIRE(tree.roots.size() == 1);
  const auto& job = tree.roots[0];
  CHECK(job.circle.r == doctest::Approx(12.1).epsilon(1e-12));
  CHECK(job.children[0].circle.r == doctest::Approx(11.0).epsilon(1e-12));
  CHECK(job.children[0].children[0].circle.r == 10.0);
  CHECK(job.children[0].children[0].annuli.size() == 3);
  CHECK_THROWS_AS(layout_snapshot(snap, LayoutStyle{0.0, 0.1, 0.1, 0.05}), Error);
}

TEST_CASE("snapshot of a synthetic trace") {
  const auto trace = generate_synthetic(SynthConfig{});
  const auto store = build_store(trace.bundle);
  CHECK(build_snapshot(store, 99999).out_of_range);

  for (Timestamp t = 0; t < 7200; t += 300) {
    const auto snap = build_snapshot(store, t);
    const auto active = batchlens::testing::brute_active_jobs(trace.bundle, t);
    REQUIRE(snap.roots.size() == active.size());

    // Each (job, task, machine) triple active at t appears exactly once.
    std::multiset<std::tuple<std::string, std::string, std::string>> expected, got;
    for (const auto& inst : trace.bundle.instances) {
      if (inst.active_at(t)) expected.insert({inst.job_id, inst.task_id, inst.machine_id});
    }
    std::set<std::tuple<std::string, std::string, std::string>> dedup(expected.begin(), expected.end());
    for (const auto& j : snap.roots) {
      for (const auto& task : j.tasks) {
        CHECK(std::is_sorted(task.machines.begin(), task.machines.end(),
                             [](auto& a, auto& b) { return a.machine_id < b.machine_id; }));
        for (const auto& m : task.machines) {
          got.insert({j.job_id, task.task_id, m.machine_id});
          const auto s = store.sample_at(m.machine_id, t);
          CHECK(m.cpu_util == (s ? std::optional(s->cpu) : std::nullopt));
        }
      }
    }
    CHECK(got == std::multiset(dedup.begin(), dedup.end()));

    const auto tree = layout_snapshot(snap, LayoutStyle{});
    std::size_t checked = 0;
    check_layout(tree.roots, nullptr, checked);
    for (const auto& root : tree.roots) {
      const auto& b = tree.bounds;
      CHECK(std::hypot(root.circle.cx - b.cx, root.circle.cy - b.cy) + root.circle.r <= b.r + 1e-6);
    }
    CHECK(layout_snapshot(snap, LayoutStyle{}).roots.size() == tree.roots.size());
  }
}
