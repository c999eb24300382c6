#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "evschema/commands.hpp"

namespace evschema {

enum class JobStatus { pending, running, done, failed };
std::string to_string(JobStatus s);

inline const std::vector<std::string>& job_kinds() {
  static const std::vector<std::string> k = {"mine", "build", "coverage", "rank", "intrusion", "infer"};
  return k;
}

struct JobRecord {
  std::string id;
  std::string kind;
  JobStatus status = JobStatus::pending;
  json config;  // full snapshot; rerunning it reproduces the outputs
  std::vector<std::string> outputs;
  std::string report;
  json summary;
  std::string error;

  json to_json() const;
};

/// Fixed pool of workers draining a FIFO queue. Each job gets its own output
/// directory under `root`, where job.json mirrors the record.
class JobManager {
 public:
  using Runner = std::function<CommandResult(const std::string& kind, const json& config,
                                             const std::filesystem::path& out_dir)>;

  JobManager(std::filesystem::path root, std::size_t workers, Runner runner);
  ~JobManager();
  JobManager(const JobManager&) = delete;
  JobManager& operator=(const JobManager&) = delete;

  /// Throws PreconditionError for an unknown kind.
  JobRecord submit(const std::string& kind, json config);
  std::optional<JobRecord> get(const std::string& id) const;
  std::vector<JobRecord> list() const;
  /// Blocks until the job finishes or the timeout passes.
  std::optional<JobRecord> wait(const std::string& id, std::chrono::milliseconds timeout) const;

  std::filesystem::path job_dir(const std::string& id) const { return root_ / id; }
  /// Called after a job reaches done (outside the lock).
  void on_done(std::function<void(const JobRecord&)> hook) { done_hook_ = std::move(hook); }

 private:
  void work();
  void persist(const JobRecord& r) const;
  void persist_quietly(const JobRecord& r) const;

  std::filesystem::path root_;
  Runner runner_;
  std::function<void(const JobRecord&)> done_hook_;
  mutable std::mutex mu_;
  mutable std::condition_variable changed_;
  std::condition_variable queued_;
  std::deque<std::string> queue_;
  std::map<std::string, JobRecord> jobs_;
  std::size_t next_id_ = 1;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace evschema
