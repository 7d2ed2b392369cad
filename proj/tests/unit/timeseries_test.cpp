#include <doctest.h>

#include <random>
#include <set>

#include "batchlens/synth.hpp"
#include "batchlens/timeseries.hpp"
#include "test_support.hpp"

using namespace batchlens;
namespace bt = batchlens::testing;

namespace {

Series random_series(std::mt19937_64& rng, std::size_t n) {
  Series s{"m", Metric::Cpu, {}};
  std::uniform_real_distribution<double> v(0, 100);
  Timestamp t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t += 1 + static_cast<Timestamp>(rng() % 120);
    s.points.push_back({t, v(rng)});
  }
  return s;
}

TraceBundle annotated_bundle() {
  TraceBundle b;
  b.tasks = {{"j", "task_A1", 0, 600, 2, Status::Terminated, {}},
             {"j", "task_B2_1", 0, 900, 2, Status::Terminated, {}},
             {"j", "task_C3", 0, std::nullopt, 1, Status::Running, {}}};
  b.instances = {{"j", "task_A1", "m_1", 0, 600, Status::Terminated},
                 {"j", "task_A1", "m_2", 0, 600, Status::Terminated},
                 {"j", "task_B2_1", "m_1", 0, 900, Status::Terminated},
                 {"j", "task_B2_1", "m_3", 0, 900, Status::Terminated},
                 {"j", "task_C3", "m_3", 0, std::nullopt, Status::Running}};
  for (Timestamp t = 0; t < 1200; t += 60) {
    for (const char* m : {"m_1", "m_2", "m_3"}) b.usage.push_back({t, m, 40.0, 50.0, 60.0});
  }
  b.usage.push_back({1200, "m_4", 10.0, 10.0, 10.0});
  b.manifest = compute_manifest(b.usage, b.tasks, b.instances);
  return b;
}

}  // namespace

TEST_CASE("machine series respects the half-open window") {
  const auto store = build_store(annotated_bundle());
  CHECK(machine_series(store, "m_1", Metric::Cpu, TimeWindow(0, 120)).points.size() == 2);
  CHECK(machine_series(store, "m_1", Metric::Cpu, TimeWindow(0, 121)).points.size() == 3);
  CHECK(machine_series(store, "m_1", Metric::Cpu, TimeWindow(5000, 6000)).points.empty());
  CHECK(machine_series(store, "m_1", Metric::Mem, store.horizon()).points.size() == 20);
  CHECK_THROWS_AS(machine_series(store, "zz", Metric::Cpu, store.horizon()), Error);
}

TEST_CASE("job bundle annotations cluster by task") {
  const auto store = build_store(annotated_bundle());
  const auto b = job_series_bundle(store, "j", Metric::Cpu, store.horizon());
  CHECK(b.series.size() == 3);
  CHECK(b.task_color_index == std::map<std::string, std::size_t>{{"task_A1", 0}, {"task_B2_1", 1}, {"task_C3", 2}});

  std::set<Timestamp> starts, ends;
  std::size_t start_count = 0;
  for (const auto& a : b.annotations) {
    (a.kind == AnnotationKind::Start ? starts : ends).insert(a.timestamp);
    start_count += a.kind == AnnotationKind::Start;
  }
  CHECK(starts == std::set<Timestamp>{0});
  CHECK(start_count == 5);
  CHECK(ends == std::set<Timestamp>{600, 900});
  CHECK(std::is_sorted(b.annotations.begin(), b.annotations.end(),
                       [](auto& x, auto& y) { return x.timestamp < y.timestamp; }));
  CHECK_THROWS_AS(job_series_bundle(store, "nope", Metric::Cpu, store.horizon()), Error);
}

TEST_CASE("start annotations equal instances starting inside the window") {
  const auto trace = generate_synthetic(SynthConfig{});
  const auto store = build_store(trace.bundle);
  std::mt19937_64 rng(4);
  for (const auto& [job_id, _] : store.jobs()) {
    const Timestamp a = static_cast<Timestamp>(rng() % 7000);
    const TimeWindow w(a, a + 1 + static_cast<Timestamp>(rng() % 3000));
    const auto b = job_series_bundle(store, job_id, Metric::Mem, w);
    std::set<std::tuple<Timestamp, std::string, std::string>> expected;
    for (const auto& inst : trace.bundle.instances) {
      if (inst.job_id == job_id && w.contains(inst.start_ts)) expected.insert({inst.start_ts, inst.task_id, inst.machine_id});
    }
    const auto starts = std::count_if(b.annotations.begin(), b.annotations.end(),
                                      [](const Annotation& x) { return x.kind == AnnotationKind::Start; });
    CHECK(static_cast<std::size_t>(starts) == expected.size());
  }
}

TEST_CASE("brush slices compose by intersection") {
  const auto trace = generate_synthetic(SynthConfig{});
  const auto store = build_store(trace.bundle);
  std::mt19937_64 rng(8);
  for (const auto& [job_id, _] : store.jobs()) {
    const auto full = job_series_bundle(store, job_id, Metric::Cpu, store.horizon());
    CHECK(brush_slice(full, store.horizon()) == full);
    for (int i = 0; i < 5; ++i) {
      const auto a = static_cast<Timestamp>(rng() % 6000), b = static_cast<Timestamp>(rng() % 6000);
      const TimeWindow w1(a, a + 600 + static_cast<Timestamp>(rng() % 2000));
      const TimeWindow w2(b, b + 600 + static_cast<Timestamp>(rng() % 2000));
      const auto twice = brush_slice(brush_slice(full, w1), w2);
      if (const auto both = w1.intersect(w2)) {
        CHECK(twice == brush_slice(full, *both));
      } else {
        for (const auto& s : twice.series) CHECK(s.points.empty());
        CHECK(twice.annotations.empty());
      }
      CHECK(twice.task_color_index == full.task_color_index);
    }
  }
}

TEST_CASE("cluster timeline equals brute-force grouping") {
  TraceBundle tiny;
  tiny.usage = {{0, "a", 40, 1, 1}, {0, "b", 60, 1, 1}};
  tiny.tasks = {{"j", "t", 0, 60, 1, Status::Terminated, {}}};
  tiny.manifest = compute_manifest(tiny.usage, tiny.tasks, tiny.instances);
  const auto two = cluster_timeline(build_store(tiny), Metric::Cpu, 1);
  REQUIRE(two.points.size() == 1);
  CHECK(two.points[0].mean == 50.0);
  CHECK(two.points[0].min == 40.0);
  CHECK(two.points[0].max == 60.0);

  const auto trace = generate_synthetic(SynthConfig{});
  const auto store = build_store(trace.bundle);
  CHECK_THROWS_AS(cluster_timeline(store, Metric::Cpu, 30), Error);
  for (std::int64_t res : {60, 300, 900}) {
    std::map<Timestamp, std::vector<double>> groups;
    for (const auto& s : trace.bundle.usage) groups[s.timestamp / res * res].push_back(s.disk_util);
    const auto tl = cluster_timeline(store, Metric::Disk, res);
    REQUIRE(tl.points.size() == groups.size());
    std::size_t k = 0;
    for (const auto& [t, vs] : groups) {
      const auto& p = tl.points[k++];
      double sum = 0;
      for (double v : vs) sum += v;
      CHECK(p.timestamp == t);
      CHECK(p.samples == vs.size());
      CHECK(std::abs(p.mean - sum / vs.size()) <= 1e-9);
      CHECK(p.min == *std::min_element(vs.begin(), vs.end()));
      CHECK(p.max == *std::max_element(vs.begin(), vs.end()));
      CHECK(p.min <= p.mean);
      CHECK(p.mean <= p.max);
    }
  }
}

TEST_CASE("downsample identity, endpoints and errors") {
  std::mt19937_64 rng(2);
  const auto three = random_series(rng, 3);
  CHECK(downsample(three, 3) == three);
  const auto hundred = random_series(rng, 100);
  const auto ten = downsample(hundred, 10);
  REQUIRE(ten.points.size() == 10);
  CHECK(ten.points.front() == hundred.points.front());
  CHECK(ten.points.back() == hundred.points.back());
  CHECK(downsample(ten, 10) == ten);
  CHECK_THROWS_AS(downsample(hundred, 1), Error);
}

TEST_CASE("downsample matches the reference implementation") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 400;
    const std::size_t target = 2 + rng() % n;
    const auto s = random_series(rng, n);
    std::vector<double> xs, ys;
    for (const auto& p : s.points) {
      xs.push_back(static_cast<double>(p.timestamp));
      ys.push_back(p.value);
    }
    const auto idx = bt::reference_lttb(xs, ys, target);
    const auto got = downsample(s, target);
    REQUIRE(got.points.size() == idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) CHECK(got.points[k] == s.points[idx[k]]);
  }
}
