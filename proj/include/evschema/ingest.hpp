#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evschema/json_io.hpp"
#include "evschema/ontology.hpp"

namespace evschema {

struct EntityValue {
  std::string entity;
  double confidence = 1.0;
  bool operator==(const EntityValue&) const = default;
};

struct ExtractedParticipant {
  std::string id;
  std::string role;  // short role name, e.g. "Destination"
  std::vector<EntityValue> values;
  bool operator==(const ExtractedParticipant&) const = default;
};

struct ExtractedEvent {
  std::string id;
  std::string event_type;  // "Movement.Transportation.Unspecified" or a source-ontology id
  double confidence = 1.0;
  std::vector<ExtractedParticipant> participants;
  bool operator==(const ExtractedEvent&) const = default;
};

struct DocumentGraph {
  std::string doc_id;
  std::vector<ExtractedEvent> events;
  std::set<std::string> entities;
  bool operator==(const DocumentGraph&) const = default;
};

struct MappingRule {
  std::string target;
  std::map<std::string, std::string> role_renames;
};

/// Source event type -> target ontology event type. Types that already belong
/// to the target ontology pass through unchanged so re-mapping is idempotent.
struct EventTypeMapping {
  std::map<std::string, MappingRule> rules;
  TypeSet target_types;
};

struct MappedDocument {
  DocumentGraph doc;
  std::size_t dropped = 0;
};

struct EventMultiset {
  std::string doc_id;
  std::map<std::string, std::size_t> counts;

  std::size_t total() const;
  bool operator==(const EventMultiset&) const = default;
};

struct Transaction {
  std::string doc_id;
  std::string chain_id;
  std::vector<std::string> items;  // sorted, unique
  bool operator==(const Transaction&) const = default;
};

/// Strips "...Primitives/Events/" style prefixes from qualified type names.
std::string normalize_event_type(std::string_view qualified);
/// "…/Slots/Destination" -> "Destination".
std::string normalize_role(std::string_view qualified);

/// Accepts a document object ({"@id", "events": [...]}), a bare array of
/// events, or a single event object. `fallback_id` names documents that carry
/// no id of their own.
DocumentGraph parse_document_graph(std::string_view source, const std::string& fallback_id = {});
DocumentGraph document_from_json(const json& doc, const std::string& fallback_id = {});
json document_to_json(const DocumentGraph& doc);

/// A directory of *.json / *.jsonl files (sorted by name) or a single file.
/// In .jsonl files every non-blank line is one document.
std::vector<DocumentGraph> load_corpus(const std::filesystem::path& path);

EventTypeMapping load_mapping(std::string_view text, const Ontology& ontology);
EventTypeMapping load_mapping_file(const std::filesystem::path& path, const Ontology& ontology);
/// Every target type of the ontology mapped to itself.
EventTypeMapping identity_mapping(const Ontology& ontology);

MappedDocument apply_mapping(const DocumentGraph& doc, const EventTypeMapping& mapping);

EventMultiset event_multiset(const DocumentGraph& doc);

/// One transaction per entity that takes part in at least one event.
std::vector<Transaction> build_transactions(const DocumentGraph& doc);

std::string format_transaction(const Transaction& t);
Transaction parse_transaction_line(std::string_view line, std::size_t line_no = 0);
void write_transactions(std::ostream& out, const std::vector<Transaction>& transactions);
std::vector<Transaction> read_transactions(std::istream& in);

struct CorpusStructures {
  std::vector<DocumentGraph> documents;  // mapped
  std::vector<EventMultiset> multisets;
  std::vector<Transaction> transactions;
  std::size_t dropped_events = 0;
};

/// Maps every document and derives multisets and transactions. Documents are
/// processed in parallel; results keep corpus order.
CorpusStructures prepare_corpus(const std::vector<DocumentGraph>& raw,
                                const EventTypeMapping& mapping);

}  // namespace evschema
