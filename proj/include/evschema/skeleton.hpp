#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evschema/mining.hpp"
#include "evschema/ontology.hpp"
#include "evschema/schema.hpp"

namespace evschema {

/// Pairwise compatibility: how apt it is for `second` to follow `first`.
/// Not assumed symmetric.
class PairScorer {
 public:
  virtual ~PairScorer() = default;
  virtual double cscore(std::string_view first, std::string_view second) const = 0;
};

/// Dense table over a fixed list of event types. Pairs involving a type
/// outside the table score 0.
class DenseScorer final : public PairScorer {
 public:
  DenseScorer(std::vector<std::string> types, std::vector<double> row_major);

  double cscore(std::string_view first, std::string_view second) const override;

  const std::vector<std::string>& types() const { return types_; }
  double at(std::size_t i, std::size_t j) const { return table_[i * types_.size() + j]; }

  /// Header line of tab-separated type ids, then one tab-separated row per type.
  void save(std::ostream& out) const;
  static DenseScorer load(std::istream& in);
  static DenseScorer load_file(const std::filesystem::path& path);

 private:
  std::vector<std::string> types_;
  std::vector<double> table_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Corpus stand-in for a learned scorer: positive PMI of event-type
/// co-occurrence within transactions, with add-one smoothing on all counts.
/// Pairs that never co-occur score 0; the diagonal is 0. Symmetric.
DenseScorer default_scorer(const TransactionSource& transactions,
                           std::span<const std::string> event_types);

struct BuilderConfig {
  std::size_t top_sequences = 100000;
  std::size_t reuse_cap = 50;
  std::size_t top_chains = 1000;

  void validate() const;
};

struct CandidateSequence {
  std::vector<std::string> events;
  double score = 0.0;
  std::size_t origin = 0;  // index of the source itemset
  bool operator==(const CandidateSequence&) const = default;
};

/// Mean of cscore(e_i, e_j) over all ordered pairs i < j. Needs N >= 2.
double score_sequence(std::span<const std::string> events, const PairScorer& scorer);

inline constexpr std::size_t kExhaustiveOrderLimit = 6;

/// Best-scoring order of an itemset: exhaustive for <= 6 items, greedy
/// insertion beyond. Exact ties keep the lexicographically first order.
CandidateSequence order_itemset(const FrequentItemset& itemset, const PairScorer& scorer,
                                std::size_t origin = 0);

/// Orders and scores every itemset with at least two items (parallel).
std::vector<CandidateSequence> score_candidates(std::span<const FrequentItemset> itemsets,
                                                const PairScorer& scorer);
std::vector<CandidateSequence> score_candidates_serial(std::span<const FrequentItemset> itemsets,
                                                       const PairScorer& scorer);

/// Score desc (ties lexicographic), then one sequential pass of the reuse
/// filter, then truncation to top_sequences. Inherently sequential.
std::vector<CandidateSequence> rank_and_diversify(std::vector<CandidateSequence> candidates,
                                                  const BuilderConfig& config);

/// Appends to each kept sequence the best continuation event and the best
/// other kept sequence starting with it. Returns the top_chains chains.
std::vector<SkeletonSchema> extend_chains(std::span<const CandidateSequence> kept,
                                          const PairScorer& scorer,
                                          std::span<const std::string> event_universe,
                                          const BuilderConfig& config);

/// Writes the ranked human-readable queue (rank, score, labels) and the
/// machine-readable skeleton file (one JSON object per line).
void export_curation_queue(std::span<const SkeletonSchema> chains, const Ontology* ontology,
                           const std::filesystem::path& queue_path,
                           const std::filesystem::path& skeleton_path);

std::vector<SkeletonSchema> read_skeletons(const std::filesystem::path& skeleton_path);

}  // namespace evschema
