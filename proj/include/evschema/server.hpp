#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "evschema/config.hpp"
#include "evschema/jobs.hpp"
#include "evschema/ontology.hpp"
#include "evschema/store.hpp"

namespace httplib {
class Server;
}

namespace evschema {

/// HTTP front end over a library store, the ontology, skeletons and jobs.
///   GET    /ontology
///   GET    /schemas                 GET /schemas/{id}
///   PUT    /schemas/{id}            version via If-Match or ?version= (absent = create only);
///                                   error-level issues -> 422 unless ?draft=true
///   DELETE /schemas/{id}
///   POST   /validate                pure; always 200 with the report
///   POST   /skeletons/{id}/instantiate
///   POST   /jobs/{kind}             GET /jobs  GET /jobs/{id}  GET /jobs/{id}/output[?name=]
/// Errors: 400 malformed, 404 unknown, 409 version conflict, 422 invalid schema.
class Server {
 public:
  Server(std::shared_ptr<const Ontology> ontology, const Config& config);
  ~Server();

  /// Binds (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  void stop();

  LibraryStore& store() { return *store_; }
  JobManager& jobs() { return *jobs_; }

 private:
  void routes();
  CommandResult run_job(const std::string& kind, const json& snapshot,
                        const std::filesystem::path& out_dir);
  void load_skeletons(const std::filesystem::path& path);

  std::shared_ptr<const Ontology> ontology_;
  Config config_;
  std::unique_ptr<LibraryStore> store_;
  std::unique_ptr<JobManager> jobs_;
  std::unique_ptr<httplib::Server> http_;
  std::mutex skeleton_mu_;
  std::map<std::string, SkeletonSchema> skeletons_;
};

}  // namespace evschema
