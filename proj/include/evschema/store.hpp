#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "evschema/error.hpp"
#include "evschema/schema.hpp"

namespace evschema {

/// Raised when a write carries a version other than the stored one.
class VersionConflict : public Error {
 public:
  VersionConflict(std::string id, std::uint64_t expected, std::uint64_t actual)
      : Error("schema '" + id + "' is at version " + std::to_string(actual) + ", not " +
              std::to_string(expected)),
        actual_(actual) {}
  std::uint64_t actual() const noexcept { return actual_; }

 private:
  std::uint64_t actual_;
};

struct ManifestEntry {
  std::string id;
  std::string file;
  std::uint64_t version = 0;
  Provenance provenance;
  bool draft = false;  // saved over validation errors
};

/// Ids usable as file names: [A-Za-z0-9_.-]+, not starting with '.'.
bool is_storable_id(const std::string& id);

/// One schema document per file under `root`, plus manifest.json for listing.
/// Writes go through temp file + rename. A missing or unreadable manifest is
/// rebuilt from the schema files (versions restart at 1). Thread-safe.
class LibraryStore {
 public:
  explicit LibraryStore(std::filesystem::path root);

  std::vector<ManifestEntry> list() const;
  std::optional<std::pair<Schema, std::uint64_t>> get(const std::string& id) const;
  /// Creates or replaces. `expected_version` 0 means "must not exist";
  /// nullopt skips the check. Returns the new version.
  std::uint64_t put(const Schema& schema, std::optional<std::uint64_t> expected_version,
                    bool draft = false);
  /// False when the id is unknown.
  bool remove(const std::string& id, std::optional<std::uint64_t> expected_version);

  std::vector<Schema> load_all() const;
  const std::filesystem::path& root() const { return root_; }

 private:
  void rebuild_manifest();
  void save_manifest() const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::map<std::string, ManifestEntry> manifest_;
};

/// Schemas of a library directory (every *.json except manifest.json) or a
/// single schema file, sorted by id.
std::vector<Schema> load_library(const std::filesystem::path& path);

}  // namespace evschema
