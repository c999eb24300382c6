#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evschema/config.hpp"
#include "evschema/intrusion.hpp"
#include "evschema/metrics.hpp"
#include "evschema/ontology.hpp"

namespace evschema {

namespace fs = std::filesystem;

/// What a command wrote and what it wants printed.
struct CommandResult {
  std::vector<fs::path> outputs;
  std::string report;
  json summary = json::object();
  int exit_code = 0;
};

/// Raw documents mapped into the ontology: through the mapping file when one
/// is given, else through the identity mapping of the ontology.
CorpusStructures load_mapped_corpus(const fs::path& corpus, const Ontology& ontology,
                                    const std::string& mapping_path);

struct MineArgs {
  fs::path corpus;
  fs::path transactions_out;
  fs::path itemsets_out;
};
CommandResult run_mine(const MineArgs& a, const Ontology& ontology, const Config& cfg);

struct BuildArgs {
  fs::path itemsets;
  fs::path transactions;  // default scorer source; ignored with a scorer table
  fs::path scorer_table;
  fs::path queue_out;
  fs::path skeletons_out;
};
CommandResult run_build(const BuildArgs& a, const Ontology& ontology, const Config& cfg);

struct InstantiateArgs {
  fs::path skeletons;
  std::string skeleton_id;
  fs::path out;
};
CommandResult run_instantiate(const InstantiateArgs& a, const Ontology& ontology);

CommandResult run_validate(const std::vector<fs::path>& schema_files, const Ontology& ontology);

struct CoverageArgs {
  fs::path corpus;
  fs::path library;
  fs::path json_out;  // optional
};
CommandResult run_coverage(const CoverageArgs& a, const Ontology& ontology, const Config& cfg);

struct RankArgs {
  fs::path corpus;
  fs::path library;
  fs::path gold;
  RankMode mode = RankMode::Schemas;
  std::vector<std::size_t> ks = {10, 30};
  fs::path json_out;
};
CommandResult run_rank(const RankArgs& a, const Ontology& ontology, const Config& cfg);

struct InferArgs {
  fs::path corpus;
  fs::path library;
  fs::path out;  // JSON lines, one document per line
};
CommandResult run_infer(const InferArgs& a, const Ontology& ontology, const Config& cfg);

struct IntrusionGenArgs {
  fs::path library;
  IntrusionMethod method = IntrusionMethod::Library;
  fs::path corpus;   // corpus method: documents to run inference on
  fs::path matches;  // corpus method: precomputed infer output instead
  std::size_t tasks_per_schema = 1;
  fs::path out_dir;
};
CommandResult run_intrusion_gen(const IntrusionGenArgs& a, const Ontology* ontology,
                                const Config& cfg);

struct IntrusionScoreArgs {
  fs::path answers;
  fs::path responses;
};
CommandResult run_intrusion_score(const IntrusionScoreArgs& a);

std::vector<DocumentMatches> read_matches(const fs::path& path);

}  // namespace evschema
