#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evschema/ingest.hpp"
#include "evschema/schema.hpp"
#include "evschema/softlogic.hpp"

namespace evschema {

inline constexpr const char* kUnkEvent = "UNK_event";
inline constexpr const char* kUnkEntity = "UNK_entity";

struct GroundingCaps {
  std::size_t max_bindings = 512;  // per (schema, document)
  // Observed truth of atoms on the UNK constants. Below 1 every UNK atom eats
  // into the Lukasiewicz conjunction, so small values zero out any partial match.
  double unk_event_truth = 1.0;
  double unk_entity_truth = 1.0;
};

/// Neo-Davidsonian observations: Type(event) at the event confidence and
/// Type/Slots/Role(event, entity) at each value confidence.
std::map<Atom, double> flatten_document(const DocumentGraph& doc);

std::string role_predicate(const std::string& event_type, const std::string& role);

struct Binding {
  std::vector<std::string> step_events;                // per step, event id or UNK_event
  std::map<std::string, std::string> participants;     // participant id -> entity or UNK_entity
};

struct Grounding {
  SoftLogicProgram program;
  std::vector<Binding> bindings;     // best-first
  std::vector<Atom> schema_atoms;    // parallel to bindings
};

/// Step rules (weight 100), one schema rule per binding (weight 10) and
/// negative priors (weight 1) on every open atom. Bindings are grown step by
/// step as a beam of width caps.max_bindings, ranked by the summed truth of
/// the document observations they use (UNK atoms add nothing); pruning sets
/// program.truncated. Two participants never bind the same real entity.
Grounding ground_schema(const Schema& schema, const DocumentGraph& doc, const GroundingCaps& caps);

struct MatchResult {
  std::string schema_id;
  double theta = 0.0;      // rescaled
  double theta_raw = 0.0;  // solved schema-atom truth
  std::size_t matched_steps = 0;
  std::size_t total_steps = 0;
  std::map<std::string, std::string> bindings;
  std::vector<std::pair<std::string, double>> predicted_events;  // UNK steps
  bool truncated = false;
  std::size_t solver_iterations = 0;
  double solver_objective = 0.0;
  bool solver_converged = false;
};

/// theta_raw * matched / total, reported at 1e-12 resolution unless every
/// step matched (then theta_raw unchanged).
double rescale_confidence(double theta_raw, std::size_t matched_steps, std::size_t total_steps);

/// Noisy-or over supporting schemas: 1 - prod(1 - theta_i); empty -> 0.
double combine_event_probability(std::span<const double> thetas);

/// The reported binding is the one with the highest rescaled theta; ties go
/// to more matched steps, then to the earlier binding.
MatchResult match_schema(const Schema& schema, const DocumentGraph& doc,
                         const GroundingCaps& caps = {}, const SolverOptions& solver = {});

/// Bag-of-events inverted index over a schema library.
class SchemaIndex {
 public:
  explicit SchemaIndex(std::span<const Schema> library);

  std::size_t size() const { return n_schemas_; }
  /// tf-idf relevance of every schema sharing at least one event type with
  /// the document; idf(t) = ln(1 + N / df(t)), score = sum tf_d * tf_s * idf^2.
  std::vector<std::pair<std::size_t, double>> score(const EventMultiset& doc) const;

 private:
  std::size_t n_schemas_ = 0;
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> postings_;
};

/// Top-k schemas (by relevance desc, ties by schema id) that share an event
/// type with the document. Throws PreconditionError on an empty index.
std::vector<const Schema*> prefilter(std::span<const Schema> library, const SchemaIndex& index,
                                     const DocumentGraph& doc, std::size_t k);

struct DocumentMatches {
  std::string doc_id;
  std::size_t n_events = 0;
  std::vector<MatchResult> matches;                 // prefiltered schemas, in library order
  std::map<std::string, double> predicted_events;   // combined over matches
};

struct InferenceOptions {
  std::size_t top_k = 10;
  GroundingCaps caps;
  SolverOptions solver;
};

/// Every document against its prefiltered schemas; documents run in parallel.
std::vector<DocumentMatches> infer_corpus(std::span<const Schema> library,
                                          std::span<const DocumentGraph> docs,
                                          const InferenceOptions& options);
std::vector<DocumentMatches> infer_corpus_serial(std::span<const Schema> library,
                                                 std::span<const DocumentGraph> docs,
                                                 const InferenceOptions& options);

json match_to_json(const MatchResult& m);
MatchResult match_from_json(const json& j);
json document_matches_to_json(const DocumentMatches& d);
DocumentMatches document_matches_from_json(const json& j);

}  // namespace evschema
