#include "evschema/jobs.hpp"

#include <algorithm>
#include <cstdio>

#include "evschema/error.hpp"

namespace evschema {

std::string to_string(JobStatus s) {
  switch (s) {
    case JobStatus::pending: return "pending";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::failed: return "failed";
  }
  return "?";
}

json JobRecord::to_json() const {
  json j{{"id", id}, {"kind", kind}, {"status", to_string(status)}, {"config", config},
         {"outputs", outputs}};
  if (!report.empty()) j["report"] = report;
  if (!summary.is_null()) j["summary"] = summary;
  if (!error.empty()) j["error"] = error;
  return j;
}

JobManager::JobManager(std::filesystem::path root, std::size_t workers, Runner runner)
    : root_(std::move(root)), runner_(std::move(runner)) {
  if (workers == 0) throw PreconditionError("job pool needs at least one worker");
  std::filesystem::create_directories(root_);
  // continue numbering after jobs left by an earlier run
  for (const auto& f : std::filesystem::directory_iterator(root_)) {
    unsigned long n = 0;
    if (std::sscanf(f.path().filename().string().c_str(), "job-%lu", &n) == 1)
      next_id_ = std::max<std::size_t>(next_id_, n + 1);
  }
  for (std::size_t i = 0; i < workers; ++i) workers_.emplace_back([this] { work(); });
}

JobManager::~JobManager() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  queued_.notify_all();
  for (auto& t : workers_) t.join();
}

JobRecord JobManager::submit(const std::string& kind, json config) {
  const auto& kinds = job_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw PreconditionError("unknown job kind '" + kind + "'");
  JobRecord r;
  {
    std::lock_guard lock(mu_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "job-%06zu", next_id_++);
    r.id = buf;
    r.kind = kind;
    r.config = std::move(config);
    std::filesystem::create_directories(job_dir(r.id));
    persist(r);  // before a worker can see it
    jobs_[r.id] = r;
    queue_.push_back(r.id);
  }
  queued_.notify_one();
  return r;
}

std::optional<JobRecord> JobManager::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

std::vector<JobRecord> JobManager::list() const {
  std::lock_guard lock(mu_);
  std::vector<JobRecord> out;
  for (const auto& [_, r] : jobs_) out.push_back(r);
  return out;
}

std::optional<JobRecord> JobManager::wait(const std::string& id,
                                          std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  const auto finished = [&] {
    auto it = jobs_.find(id);
    return it == jobs_.end() || it->second.status == JobStatus::done ||
           it->second.status == JobStatus::failed;
  };
  changed_.wait_for(lock, timeout, finished);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

void JobManager::persist(const JobRecord& r) const {
  write_file_atomic(job_dir(r.id) / "job.json", dump_canonical(r.to_json()));
}

void JobManager::persist_quietly(const JobRecord& r) const {
  try {
    persist(r);
  } catch (const std::exception&) {
    // a worker must not die over the mirror file; the in-memory record stands
  }
}

void JobManager::work() {
  while (true) {
    JobRecord r;
    {
      std::unique_lock lock(mu_);
      queued_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      const std::string id = queue_.front();
      queue_.pop_front();
      jobs_[id].status = JobStatus::running;
      r = jobs_[id];
    }
    persist_quietly(r);
    changed_.notify_all();
    try {
      CommandResult res = runner_(r.kind, r.config, job_dir(r.id));
      r.status = JobStatus::done;
      for (const auto& p : res.outputs) r.outputs.push_back(p.string());
      r.report = std::move(res.report);
      r.summary = std::move(res.summary);
    } catch (const std::exception& e) {
      r.status = JobStatus::failed;
      r.error = e.what();
    }
    persist_quietly(r);
    if (r.status == JobStatus::done && done_hook_) {
      try {
        done_hook_(r);
      } catch (const std::exception&) {
        // the job itself succeeded; hook failures do not change its status
      }
    }
    {
      std::lock_guard lock(mu_);
      jobs_[r.id] = r;
    }
    changed_.notify_all();
  }
}

}  // namespace evschema
