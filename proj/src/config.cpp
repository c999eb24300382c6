#include "evschema/config.hpp"

#include <cctype>
#include <cstdlib>

#include "evschema/error.hpp"

namespace evschema {

namespace {

// Every key is a flat string/number so the same table serves files and the environment.
struct Key {
  const char* name;
  std::function<void(Config&, const json&)> set;
  std::function<json(const Config&)> get;
};

template <class T>
T as(const json& v, const char* key) {
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      return v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (v.is_string()) return static_cast<T>(std::stod(v.get<std::string>()));
      return v.get<T>();
    } else {
      if (v.is_string()) {
        const auto s = v.get<std::string>();
        std::size_t pos = 0;
        const auto n = std::stoll(s, &pos);
        if (pos != s.size() || n < 0) throw std::invalid_argument(s);
        return static_cast<T>(n);
      }
      if (!v.is_number_integer() || v.get<long long>() < 0) throw std::invalid_argument("int");
      return v.get<T>();
    }
  } catch (const std::exception&) {
    throw ParseError(std::string("config.") + key, "bad value " + v.dump());
  }
}

const std::vector<Key>& keys() {
#define STR(k, f) {k, [](Config& c, const json& v) { c.f = as<std::string>(v, k); }, [](const Config& c) { return json(c.f); }}
#define NUM(k, T, f) {k, [](Config& c, const json& v) { c.f = as<T>(v, k); }, [](const Config& c) { return json(c.f); }}
  static const std::vector<Key> table = {
      STR("ontology", ontology),
      STR("library", library),
      STR("mapping", mapping),
      NUM("seed", std::uint64_t, seed),
      NUM("min_support", std::size_t, mining.min_support),
      NUM("min_items", std::size_t, mining.min_items),
      NUM("max_items", std::size_t, mining.max_items),
      NUM("top_sequences", std::size_t, builder.top_sequences),
      NUM("reuse_cap", std::size_t, builder.reuse_cap),
      NUM("top_chains", std::size_t, builder.top_chains),
      NUM("top_k", std::size_t, inference.top_k),
      NUM("max_bindings", std::size_t, inference.caps.max_bindings),
      NUM("unk_event_truth", double, inference.caps.unk_event_truth),
      NUM("unk_entity_truth", double, inference.caps.unk_entity_truth),
      NUM("solver_tolerance", double, inference.solver.tolerance),
      NUM("solver_max_iter", std::size_t, inference.solver.max_iterations),
      STR("thresholds", thresholds),
      STR("strata", strata),
      STR("host", host),
      NUM("port", int, port),
      NUM("workers", std::size_t, workers),
      STR("jobs_dir", jobs_dir),
      STR("skeletons", skeletons),
  };
#undef STR
#undef NUM
  return table;
}

}  // namespace

void Config::apply_json(const json& j) {
  if (!j.is_object()) throw ParseError("config", "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const auto& key : keys())
      if (k == key.name) {
        key.set(*this, v);
        known = true;
      }
    if (!known) throw ParseError("config." + k, "unknown key");
  }
}

void Config::apply_env(const std::function<std::optional<std::string>(const std::string&)>& getenv) {
  for (const auto& key : keys()) {
    std::string var = "EVSCHEMA_";
    for (const char* p = key.name; *p; ++p) var += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    if (auto v = getenv(var)) key.set(*this, json(*v));
  }
}

void Config::apply_process_env() {
  apply_env([](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  });
}

json Config::to_json() const {
  json j = json::object();
  for (const auto& key : keys()) j[key.name] = key.get(*this);
  return j;
}

Config load_config(const std::optional<std::filesystem::path>& file) {
  Config c;
  if (file) c.apply_json(parse_json_lenient(read_file(*file), file->string()));
  c.apply_process_env();
  return c;
}

}  // namespace evschema
