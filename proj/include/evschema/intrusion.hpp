#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "evschema/inference.hpp"
#include "evschema/rng.hpp"
#include "evschema/schema.hpp"

namespace evschema {

/// |A ∩ B| / |A ∪ B|, with J(∅, ∅) = 0.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

/// Participant of the intruding step e (in T) -> participant of the host S.
using ParticipantMap = std::map<std::string, std::string>;

/// [prod J_i]^(1/n); n = 0 gives 1 (no evidence against the swap).
double geometric_weight(std::span<const double> overlaps);

using ParticipantSets = std::map<std::string, std::set<std::string>>;

/// Geometric mean of J(type(x), type(y)) over the pairs of the map, where
/// type() is the coarse type set of a participant.
double library_weight(const ParticipantMap& map, const ParticipantSets& types_of_x,
                      const ParticipantSets& types_of_y);

/// Same structure over the entities each participant is bound to in document d.
double corpus_weight(const ParticipantMap& map, const ParticipantSets& ent_of_x,
                     const ParticipantSets& ent_of_y);

ParticipantSets coarse_types_of(const Schema& schema);

/// Participant ids filling any role of the step, first-seen order.
std::vector<std::string> step_participants(const Step& step);

inline constexpr std::size_t kMaxMapsPerStep = 10000;

/// All |to|^|from| complete maps when that is at most `cap`; otherwise `cap`
/// distinct maps drawn uniformly.
std::vector<ParticipantMap> enumerate_maps(std::span<const std::string> from,
                                           std::span<const std::string> to, std::size_t cap,
                                           Rng& rng);

/// The step with its fillers renamed through the map (id left unchanged).
Step remap_step(const Step& step, const ParticipantMap& map);

/// True when S already has a step with the same event type and fillers.
bool duplicates_existing_step(const Schema& host, const Step& remapped);

struct RenameResult {
  std::string text;
  std::vector<std::string> residual;  // source names still present after renaming
};

/// Case-insensitive, whole-token, longest-name-first replacement in a single
/// left-to-right pass. `check` names are flagged when they survive.
RenameResult rename_text(const std::string& text,
                         const std::vector<std::pair<std::string, std::string>>& names,
                         const std::vector<std::string>& check = {});

/// Rewrites e's description with participant names of T replaced by the
/// names of their images in S; flags names of T that S does not share.
RenameResult rename_step(const Step& e, const ParticipantMap& map, const Schema& source,
                         const Schema& host);

enum class IntrusionMethod { Library, Corpus };
std::string to_string(IntrusionMethod m);
IntrusionMethod parse_intrusion_method(const std::string& s);

struct IntrusionCandidate {
  std::string host_schema;
  std::string source_schema;
  Step step;
  ParticipantMap map;
  double weight = 0.0;
  std::optional<std::string> doc_id;
};

std::vector<IntrusionCandidate> library_candidates(const Schema& host,
                                                   std::span<const Schema> library, Rng& rng,
                                                   std::size_t map_cap = kMaxMapsPerStep);

/// Inference output of one document, restricted to the matched schemas.
struct MatchedDocument {
  std::string doc_id;
  std::size_t n_events = 0;
  std::vector<MatchResult> matches;
};

/// Candidates from documents with 2..10 events that S and T both match
/// (theta > 0); ent(x, d) is the entity x is bound to, empty when UNK.
std::vector<IntrusionCandidate> corpus_candidates(const Schema& host,
                                                  std::span<const Schema> library,
                                                  std::span<const MatchedDocument> corpus,
                                                  Rng& rng,
                                                  std::size_t map_cap = kMaxMapsPerStep);

/// Weighted draw with rejection of duplicate or non-camouflaged intruders.
/// Returns nullopt when no acceptable candidate has positive weight.
std::optional<IntrusionCandidate> draw_candidate(const Schema& host,
                                                 std::span<const Schema> library,
                                                 std::vector<IntrusionCandidate> candidates,
                                                 Rng& rng);

struct IntrusionTask {
  std::string task_id;
  std::string host_schema;
  IntrusionMethod method = IntrusionMethod::Library;
  std::vector<std::string> steps_shown;
  std::size_t answer_index = 0;
  IntrusionCandidate provenance;
  std::string original_description;
  std::vector<std::string> residual_names;
  std::uint64_t shuffle_seed = 0;
};

struct TaskSkip {
  std::string host_schema;
  std::string reason;
};

struct GenerationResult {
  std::vector<IntrusionTask> tasks;
  std::vector<TaskSkip> skipped;
};

struct GenerationOptions {
  IntrusionMethod method = IntrusionMethod::Library;
  std::uint64_t seed = 0;
  std::size_t tasks_per_schema = 1;
  std::size_t map_cap = kMaxMapsPerStep;
};

/// Text shown for a host step: its description, else its event type.
std::string step_text(const Step& step);

IntrusionTask build_task(const Schema& host, std::span<const Schema> library,
                         const IntrusionCandidate& chosen, IntrusionMethod method,
                         const std::string& task_id, std::uint64_t shuffle_seed);

/// One independent, seeded generation per (host schema, task index); hosts
/// run in parallel and the output order follows the library.
GenerationResult generate_tasks(std::span<const Schema> library,
                                std::span<const MatchedDocument> corpus,
                                const GenerationOptions& options);

void write_tasks(std::ostream& out, std::span<const IntrusionTask> tasks);
void write_answer_key(std::ostream& out, std::span<const IntrusionTask> tasks);
void write_review(std::ostream& out, std::span<const IntrusionTask> tasks);

struct AnswerKeyEntry {
  std::size_t answer_index = 0;
  std::size_t n_shown = 0;
};
using AnswerKey = std::map<std::string, AnswerKeyEntry>;
AnswerKey read_answer_key(std::istream& in);

/// task id -> exactly three picks, in file order.
using ResponseSet = std::map<std::string, std::vector<std::size_t>>;
/// Lines "task_id<TAB>annotator_id<TAB>pick"; every task needs exactly 3.
ResponseSet read_responses(std::istream& in);

struct Baselines {
  double random = 0.0;
  double random_1 = 0.0;
  double random_2 = 0.0;
  double random_3 = 0.0;
};

/// random_n = mean over tasks of P(Binomial(3, p) >= n); random = mean p.
Baselines baselines_for_probabilities(std::span<const double> p);
/// Per task p = 1/(k+1) for k host steps.
Baselines random_baselines(std::span<const std::size_t> host_step_counts);

struct AccuracyReport {
  std::size_t tasks = 0;
  double total = 0.0;
  double one_ann = 0.0;
  double two_ann = 0.0;
  double all_ann = 0.0;
  Baselines baselines;
};

AccuracyReport score_responses(const AnswerKey& key, const ResponseSet& responses);
std::string format_accuracy(const AccuracyReport& r);
json accuracy_to_json(const AccuracyReport& r);

}  // namespace evschema
