#include <doctest.h>

#include "batchlens/store.hpp"
#include "batchlens/synth.hpp"
#include "test_support.hpp"

using namespace batchlens;
namespace bt = batchlens::testing;

namespace {

TraceBundle two_job_bundle() {
  TraceBundle b;
  b.tasks = {{"j_1", "task_M1", 0, 600, 2, Status::Terminated, {}},
             {"j_2", "task_M1", 300, std::nullopt, 1, Status::Running, {}}};
  b.instances = {{"j_1", "task_M1", "m_1", 0, 600, Status::Terminated},
                 {"j_1", "task_M1", "m_2", 0, 600, Status::Terminated},
                 {"j_2", "task_M1", "m_2", 300, std::nullopt, Status::Running}};
  for (Timestamp t = 0; t < 1200; t += 60) {
    b.usage.push_back({t, "m_1", 10, 20, 30});
    b.usage.push_back({t, "m_2", 40, 50, 60});
  }
  b.manifest = compute_manifest(b.usage, b.tasks, b.instances);
  return b;
}

}  // namespace

TEST_CASE("half-open activity at boundaries") {
  const auto store = build_store(two_job_bundle());
  CHECK(store.active_jobs_at(0).value == std::vector<std::string>{"j_1"});
  CHECK(store.active_jobs_at(300).value == std::vector<std::string>{"j_1", "j_2"});
  CHECK(store.active_jobs_at(600).value == std::vector<std::string>{"j_2"});
  CHECK(store.active_jobs_at(5000).out_of_range);
  CHECK(store.active_jobs_at(-1).out_of_range);

  const auto multi = store.multi_job_machines_at(300).value;
  REQUIRE(multi.size() == 1);
  CHECK(multi.at("m_2") == std::vector<std::string>{"j_1", "j_2"});
  CHECK(store.multi_job_machines_at(600).value.empty());
}

TEST_CASE("job summaries and lookups") {
  const auto store = build_store(two_job_bundle());
  const auto& j1 = store.job("j_1");
  CHECK(j1.task_count == 1);
  CHECK(j1.instance_count == 2);
  CHECK(j1.start_ts == 0);
  CHECK(j1.end_ts == 600);
  CHECK(store.job("j_2").end_ts == std::nullopt);
  CHECK(store.machines_of_job("j_1") == std::vector<std::string>{"m_1", "m_2"});
  CHECK_THROWS_AS(store.job("nope"), Error);
  CHECK_THROWS_AS(store.usage("nope"), Error);
  CHECK(store.instances_on_machine("m_2").size() == 2);
  CHECK(store.instances_of_task("j_1", "task_M1").size() == 2);
}

TEST_CASE("sample lookup uses the latest sample within one resolution step") {
  const auto store = build_store(two_job_bundle());
  CHECK(store.sample_at("m_1", 0)->timestamp == 0);
  CHECK(store.sample_at("m_1", 59)->timestamp == 0);
  CHECK(store.sample_at("m_1", 60)->timestamp == 60);
  CHECK(store.sample_at("m_1", 1179)->timestamp == 1140);
  CHECK_FALSE(store.sample_at("m_1", 1200).has_value());
}

TEST_CASE("distribution stats") {
  const auto stats = build_store(two_job_bundle()).distribution_stats();
  CHECK(stats.fraction_single_task_jobs == 1.0);
  CHECK(stats.fraction_multi_instance_tasks == doctest::Approx(0.5));
  CHECK(stats.machine_count == 2);
  CHECK(stats.job_count == 2);
}

TEST_CASE("orphan instances are dropped, a majority is fatal") {
  auto b = two_job_bundle();
  b.instances.push_back({"j_9", "task_M1", "m_1", 0, 60, Status::Terminated});
  const auto store = build_store(b);
  CHECK(store.orphan_instances() == 1);
  CHECK_FALSE(store.has_job("j_9"));
  for (int i = 0; i < 5; ++i) b.instances.push_back({"j_9", "task_M1", "m_1", 0, 60, Status::Terminated});
  CHECK_THROWS_AS(build_store(b), Error);
}

TEST_CASE("temporal queries match brute force on random bundles") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto bundle = bt::random_bundle(seed, 15, 8);
    const auto store = build_store(bundle);
    for (Timestamp t = 0; t < bundle.manifest.horizon_seconds; t += 60) {
      CHECK(store.active_jobs_at(t).value == bt::brute_active_jobs(bundle, t));
      CHECK(store.multi_job_machines_at(t).value == bt::brute_multi_job_machines(bundle, t));
    }
  }
}

TEST_CASE("synthetic store answers match the generator's view") {
  const auto trace = generate_synthetic(SynthConfig{});
  const auto store = build_store(trace.bundle);
  const auto stats = store.distribution_stats();
  CHECK(stats.job_count == trace.tally.jobs);
  CHECK(stats.fraction_single_task_jobs ==
        doctest::Approx(static_cast<double>(trace.tally.single_task_jobs) / trace.tally.jobs));
  CHECK(stats.fraction_multi_instance_tasks ==
        doctest::Approx(static_cast<double>(trace.tally.multi_instance_tasks) / trace.tally.tasks));
}
