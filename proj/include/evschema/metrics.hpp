#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evschema/ingest.hpp"
#include "evschema/schema.hpp"

namespace evschema {

/// Occurrences in the document whose type appears anywhere in the schema,
/// over the document's total occurrences. 0 for an empty document.
double sim(const EventMultiset& doc, const TypeSet& schema_types);
double sim(const EventMultiset& doc, const Schema& schema);

TypeSet schema_event_types(const Schema& schema);

/// Half-open interval [lo, hi) over the number of extracted events.
struct Stratum {
  std::size_t lo = 1;
  std::size_t hi = std::numeric_limits<std::size_t>::max();

  bool contains(std::size_t n) const { return n >= lo && n < hi; }
  std::string label() const;
  bool operator==(const Stratum&) const = default;
};

/// "1:5,5:10,10:" -> [1,5) [5,10) [10,inf). Rejects overlaps and lo == 0.
std::vector<Stratum> parse_strata(std::string_view text);
std::vector<double> parse_thresholds(std::string_view text);

struct CoverageRow {
  Stratum stratum;
  std::size_t n_docs = 0;
  std::vector<double> coverage;  // parallel to CoverageReport::thresholds
};

struct CoverageReport {
  std::string library_id;
  std::string corpus_id;
  std::vector<double> thresholds;
  std::vector<CoverageRow> strata;
  CoverageRow overall;  // [1, inf)
};

/// Best sim over the library for each document.
std::vector<double> best_similarities(std::span<const EventMultiset> corpus,
                                      std::span<const Schema> library);
std::vector<double> best_similarities_serial(std::span<const EventMultiset> corpus,
                                             std::span<const Schema> library);

CoverageReport coverage(std::span<const EventMultiset> corpus, std::span<const Schema> library,
                        std::span<const double> thresholds, std::span<const Stratum> strata);
CoverageReport coverage_serial(std::span<const EventMultiset> corpus,
                               std::span<const Schema> library,
                               std::span<const double> thresholds,
                               std::span<const Stratum> strata);

std::string format_coverage_table(const CoverageReport& report);
json coverage_to_json(const CoverageReport& report);

struct Ranked {
  std::string id;
  double sim = 0.0;
  bool operator==(const Ranked&) const = default;
};

/// Descending sim, ties by id.
std::vector<Ranked> rank_schemas(const EventMultiset& doc, std::span<const Schema> library);
std::vector<Ranked> rank_documents(const Schema& schema, std::span<const EventMultiset> corpus);

double mrr(std::span<const std::size_t> ranks);
double recall_at_k(std::span<const std::size_t> ranks, std::size_t k);
double avg_rank(std::span<const std::size_t> ranks);
/// Binary gains, discount 1/log2(i+1). Throws PreconditionError if gold is empty.
double ndcg(std::span<const std::string> ranked_ids, const std::set<std::string>& gold);

/// doc id -> gold schema ids (complex-event labels).
using GoldLabels = std::map<std::string, std::set<std::string>>;
GoldLabels parse_gold_labels(std::istream& in);
GoldLabels load_gold_labels(const std::filesystem::path& path);

enum class RankMode { Schemas, Documents };

struct RankingStats {
  Stratum stratum;
  std::size_t queries = 0;
  double avg_rank = 0.0;
  double mrr = 0.0;
  std::map<std::size_t, double> recall_at;
  double ndcg = 0.0;
  std::size_t ndcg_queries = 0;
};

struct RankingReport {
  RankMode mode = RankMode::Schemas;
  RankingStats overall;
  std::vector<RankingStats> strata;
};

/// Schemas mode: one query per gold-labelled document; rank of the first gold
/// schema, recall = gold found in top k / |gold|. Documents mode: one query
/// per schema with gold documents, over the documents of the stratum.
/// nDCG is macro-averaged over queries that have gold items.
RankingReport evaluate_ranking(std::span<const EventMultiset> corpus,
                               std::span<const Schema> library, const GoldLabels& gold,
                               RankMode mode, std::span<const std::size_t> ks,
                               std::span<const Stratum> strata);

std::string format_ranking_table(const RankingReport& report);
json ranking_to_json(const RankingReport& report);

}  // namespace evschema
