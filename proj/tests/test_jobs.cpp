#include <doctest.h>

#include <atomic>
#include <fstream>

#include "evschema/error.hpp"
#include "evschema/jobs.hpp"
#include "support.hpp"

using namespace evschema;
using namespace std::chrono_literals;

namespace {

CommandResult echo(const std::string& kind, const json& cfg, const std::filesystem::path& dir) {
  if (cfg.value("fail", false)) throw Error("asked to fail");
  const auto out = dir / (kind + ".txt");
  std::ofstream(out) << cfg.dump();
  CommandResult r;
  r.outputs.push_back(out);
  r.report = kind + " ok";
  r.summary = {{"n", cfg.value("n", 0)}};
  return r;
}

}  // namespace

TEST_CASE("jobs run to completion and persist their record") {
  testing::TempDir dir;
  JobManager jobs(dir.path(), 2, echo);
  const auto r = jobs.submit("mine", {{"n", 3}});
  CHECK(r.id == "job-000001");
  const auto done = jobs.wait(r.id, 10s);
  REQUIRE(done);
  CHECK(done->status == JobStatus::done);
  CHECK(done->report == "mine ok");
  CHECK(done->summary.at("n") == 3);
  REQUIRE(done->outputs.size() == 1);
  CHECK(read_file(done->outputs[0]) == json{{"n", 3}}.dump());

  const json persisted = json::parse(read_file(jobs.job_dir(r.id) / "job.json"));
  CHECK(persisted.at("status") == "done");
  CHECK(persisted.at("config") == json{{"n", 3}});
}

TEST_CASE("failures are recorded, unknown kinds rejected") {
  testing::TempDir dir;
  JobManager jobs(dir.path(), 1, echo);
  const auto r = jobs.submit("build", {{"fail", true}});
  const auto done = jobs.wait(r.id, 10s);
  REQUIRE(done);
  CHECK(done->status == JobStatus::failed);
  CHECK(done->error == "asked to fail");
  CHECK(done->to_json().at("error") == "asked to fail");
  CHECK_THROWS_AS(jobs.submit("dance", json::object()), PreconditionError);
  CHECK_FALSE(jobs.get("job-999999"));
  CHECK_THROWS_AS(JobManager(dir / "x", 0, echo), PreconditionError);
}

TEST_CASE("many jobs drain through a small pool") {
  testing::TempDir dir;
  std::atomic<int> running{0}, peak{0};
  JobManager jobs(dir.path(), 2, [&](const std::string& k, const json& c, const std::filesystem::path& d) {
    const int now = ++running;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(5ms);
    --running;
    return echo(k, c, d);
  });
  std::vector<std::string> ids;
  for (int i = 0; i < 12; ++i) ids.push_back(jobs.submit("coverage", {{"n", i}}).id);
  for (const auto& id : ids) REQUIRE(jobs.wait(id, 20s)->status == JobStatus::done);
  CHECK(peak <= 2);
  CHECK(jobs.list().size() == 12);
}

TEST_CASE("numbering continues after a restart") {
  testing::TempDir dir;
  {
    JobManager jobs(dir.path(), 1, echo);
    jobs.wait(jobs.submit("rank", json::object()).id, 10s);
    jobs.wait(jobs.submit("rank", json::object()).id, 10s);
  }
  JobManager again(dir.path(), 1, echo);
  CHECK(again.submit("rank", json::object()).id == "job-000003");
}

TEST_CASE("done hook sees finished jobs only") {
  testing::TempDir dir;
  std::atomic<int> hooked{0};
  JobManager jobs(dir.path(), 1, echo);
  jobs.on_done([&](const JobRecord& r) {
    CHECK(r.status == JobStatus::done);
    ++hooked;
    throw Error("hook trouble");
  });
  const auto a = jobs.submit("infer", json::object());
  const auto b = jobs.submit("infer", {{"fail", true}});
  CHECK(jobs.wait(a.id, 10s)->status == JobStatus::done);
  CHECK(jobs.wait(b.id, 10s)->status == JobStatus::failed);
  CHECK(hooked == 1);
}
