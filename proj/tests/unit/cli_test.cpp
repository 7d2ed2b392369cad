#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "batchlens/ingest.hpp"
#include "test_support.hpp"

using batchlens::testing::TempDir;
using batchlens::testing::read_file;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(BATCHLENS_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("help and usage errors") {
  for (const char* sub : {"ingest", "serve", "report", "synth"}) {
    CHECK_MESSAGE(run(std::string(sub) + " --help") == 0, sub);
  }
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("ingest") == 2);
  CHECK(run("synth --out /tmp/x --no-such-flag") == 2);
  CHECK(run("synth --out /tmp/x --mix spike") == 2);
}

TEST_CASE("synth is reproducible and ingest validates") {
  TempDir a, b;
  REQUIRE(run("synth --seed 7 --out " + a.path().string()) == 0);
  REQUIRE(run("synth --seed 7 --out " + b.path().string()) == 0);
  for (const char* name : {"server_usage.csv", "batch_task.csv", "batch_instance.csv", "manifest.json", "labels.json"}) {
    CHECK_MESSAGE(read_file(a / name) == read_file(b / name), name);
  }

  std::filesystem::remove(a / "manifest.json");
  CHECK(run("ingest " + a.path().string()) == 0);
  CHECK(std::filesystem::exists(a / "manifest.json"));
  CHECK(read_file(a / "manifest.json") == read_file(b / "manifest.json"));

  std::filesystem::remove(a / "batch_task.csv");
  CHECK(run("ingest " + a.path().string()) == 1);
  CHECK(run("synth --jobs 5 --out " + a.path().string()) == 2);
}

TEST_CASE("report writes one CSV row per label") {
  TempDir bundle, out;
  REQUIRE(run("synth --out " + bundle.path().string()) == 0);
  REQUIRE(run("report " + bundle.path().string() + " --from 0 --to 7200 --out " + out.path().string()) == 0);
  const auto labels = batchlens::labels_from_json(read_file(bundle / "labels.json"));
  const auto csv = read_file(out / "anomalies.csv");
  CHECK(count_lines(csv) == labels.size() + 1);
  CHECK(csv.rfind("kind,job_id,t_from,t_to,severity,machines\n", 0) == 0);
  CHECK(std::filesystem::exists(out / "anomalies.json"));
  CHECK(read_file(out / "summary.txt").find("jobs: 24") != std::string::npos);
  CHECK(run("report " + (bundle / "missing").string() + " --out " + out.path().string()) == 1);
}
