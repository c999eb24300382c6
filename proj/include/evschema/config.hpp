#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "evschema/inference.hpp"
#include "evschema/json_io.hpp"
#include "evschema/mining.hpp"
#include "evschema/skeleton.hpp"

namespace evschema {

/// Settings shared by the CLI, the server and jobs. Precedence when loading:
/// command-line flags > EVSCHEMA_* environment variables > config file > defaults.
struct Config {
  std::string ontology;
  std::string library;
  std::string mapping;
  std::uint64_t seed = 0;
  MiningConfig mining;
  BuilderConfig builder;
  InferenceOptions inference;
  std::string thresholds = "0.5,0.7,0.9";
  std::string strata = "1:5,5:10,10:";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t workers = 2;
  std::string jobs_dir = "jobs";
  std::string skeletons;

  /// Applies the keys present in `j`; unknown keys are an error.
  void apply_json(const json& j);
  /// Applies EVSCHEMA_<KEY> variables, e.g. EVSCHEMA_MIN_SUPPORT.
  void apply_env(const std::function<std::optional<std::string>(const std::string&)>& getenv);
  void apply_process_env();

  json to_json() const;
};

/// Reads the file (if any) then the environment on top of the defaults.
Config load_config(const std::optional<std::filesystem::path>& file);

}  // namespace evschema
