#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "evschema/json_io.hpp"
#include "evschema/ontology.hpp"
#include "evschema/schema.hpp"

namespace testing {

namespace fs = std::filesystem;

inline fs::path fixture(const std::string& rel) { return fs::path(EVSCHEMA_FIXTURES) / rel; }

inline const evschema::Ontology& ontology() {
  static const evschema::Ontology o = evschema::load_ontology_file(fixture("ontology.json"));
  return o;
}

inline evschema::Schema fixture_schema(const std::string& rel) {
  return evschema::load_schema_file(fixture(rel));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> n{0};
    path_ = fs::temp_directory_path() /
            ("evschema-test-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline int run_cli(const std::string& args, const fs::path& log = {}) {
  std::string cmd = std::string("\"") + EVSCHEMA_CLI + "\" " + args;
  cmd += log.empty() ? " >/dev/null 2>&1" : " >\"" + log.string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace testing
