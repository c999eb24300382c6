#include "evschema/store.hpp"

#include <algorithm>
#include <cctype>

#include "evschema/json_io.hpp"

namespace evschema {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.json";

Provenance parse_provenance(const std::string& s) {
  if (s == "skeleton_fleshed") return Provenance::skeleton_fleshed;
  return Provenance::manual;
}

}  // namespace

bool is_storable_id(const std::string& id) {
  if (id.empty() || id[0] == '.' || id.size() > 200) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

LibraryStore::LibraryStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
  const fs::path mf = root_ / kManifest;
  bool ok = false;
  if (fs::exists(mf)) {
    try {
      const json j = json::parse(read_file(mf));
      for (const auto& [id, e] : j.at("schemas").items()) {
        ManifestEntry m{id, e.at("file").get<std::string>(), e.at("version").get<std::uint64_t>(),
                        parse_provenance(e.value("provenance", "manual")), e.value("draft", false)};
        manifest_[id] = std::move(m);
      }
      ok = std::all_of(manifest_.begin(), manifest_.end(),
                       [&](const auto& kv) { return fs::exists(root_ / kv.second.file); });
      // files added behind the manifest's back also force a rebuild
      for (const auto& f : fs::directory_iterator(root_))
        if (f.path().extension() == ".json" && f.path().filename() != kManifest &&
            !manifest_.contains(f.path().stem().string()))
          ok = false;
    } catch (const std::exception&) {
      ok = false;
    }
  }
  if (!ok) rebuild_manifest();
}

void LibraryStore::rebuild_manifest() {
  std::map<std::string, ManifestEntry> old = std::move(manifest_);
  manifest_.clear();
  for (const auto& f : fs::directory_iterator(root_)) {
    if (f.path().extension() != ".json" || f.path().filename() == kManifest) continue;
    Schema s;
    try {
      s = load_schema_file(f.path());
    } catch (const std::exception&) {
      continue;  // not a schema document; left alone
    }
    if (s.id != f.path().stem().string()) continue;
    auto prev = old.find(s.id);
    const bool found = prev != old.end();
    manifest_[s.id] = {s.id, f.path().filename().string(), found ? prev->second.version : 1,
                       s.provenance, found && prev->second.draft};
  }
  save_manifest();
}

void LibraryStore::save_manifest() const {
  json schemas = json::object();
  for (const auto& [id, e] : manifest_) {
    schemas[id] = {{"file", e.file}, {"version", e.version}, {"provenance", to_string(e.provenance)}};
    if (e.draft) schemas[id]["draft"] = true;
  }
  write_file_atomic(root_ / kManifest, dump_canonical({{"schemas", std::move(schemas)}}));
}

std::vector<ManifestEntry> LibraryStore::list() const {
  std::lock_guard lock(mu_);
  std::vector<ManifestEntry> out;
  for (const auto& [_, e] : manifest_) out.push_back(e);
  return out;
}

std::optional<std::pair<Schema, std::uint64_t>> LibraryStore::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = manifest_.find(id);
  if (it == manifest_.end()) return std::nullopt;
  return std::make_pair(load_schema_file(root_ / it->second.file), it->second.version);
}

std::uint64_t LibraryStore::put(const Schema& schema, std::optional<std::uint64_t> expected_version,
                                bool draft) {
  if (!is_storable_id(schema.id)) throw ParseError("id", "'" + schema.id + "' is not a storable id");
  std::lock_guard lock(mu_);
  auto it = manifest_.find(schema.id);
  const std::uint64_t current = it == manifest_.end() ? 0 : it->second.version;
  if (expected_version && *expected_version != current)
    throw VersionConflict(schema.id, *expected_version, current);
  const std::string file = schema.id + ".json";
  write_file_atomic(root_ / file, serialize(schema));
  manifest_[schema.id] = {schema.id, file, current + 1, schema.provenance, draft};
  save_manifest();
  return current + 1;
}

bool LibraryStore::remove(const std::string& id, std::optional<std::uint64_t> expected_version) {
  std::lock_guard lock(mu_);
  auto it = manifest_.find(id);
  if (it == manifest_.end()) return false;
  if (expected_version && *expected_version != it->second.version)
    throw VersionConflict(id, *expected_version, it->second.version);
  fs::remove(root_ / it->second.file);
  manifest_.erase(it);
  save_manifest();
  return true;
}

std::vector<Schema> LibraryStore::load_all() const {
  std::lock_guard lock(mu_);
  std::vector<Schema> out;
  for (const auto& [_, e] : manifest_) out.push_back(load_schema_file(root_ / e.file));
  return out;
}

std::vector<Schema> load_library(const fs::path& path) {
  std::vector<Schema> out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(path))
      if (f.path().extension() == ".json" && f.path().filename() != kManifest) files.push_back(f.path());
    for (const auto& f : files) out.push_back(load_schema_file(f));
  } else {
    out.push_back(load_schema_file(path));
  }
  std::sort(out.begin(), out.end(), [](const Schema& a, const Schema& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].id == out[i - 1].id) throw ValidationError({"duplicate schema id '" + out[i].id + "'"});
  return out;
}

}  // namespace evschema
