#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evschema/json_io.hpp"
#include "evschema/ontology.hpp"

namespace evschema {

struct Participant {
  std::string id;
  std::string name;
  TypeSet coarse_types;
  TypeSet fine_types;  // external ids such as Q156839, never dereferenced

  bool operator==(const Participant&) const = default;
};

struct Step {
  std::string id;
  std::string event_type;
  std::map<std::string, std::vector<std::string>> fillers;  // role -> participant ids
  std::string description;

  bool operator==(const Step&) const = default;
};

struct RelationInstance {
  std::string relation_type;
  std::string subject;
  std::string object;

  bool operator==(const RelationInstance&) const = default;
};

enum class OrderingKind { linear, unordered_group, exclusive_group };

struct OrderingConstraint {
  OrderingKind kind = OrderingKind::linear;
  std::vector<std::string> members;

  bool operator==(const OrderingConstraint&) const = default;
};

enum class Provenance { manual, skeleton_fleshed };

struct Schema {
  std::string id;
  std::string name;
  std::string description;
  std::vector<Step> steps;
  std::vector<Participant> participants;
  std::vector<RelationInstance> relations;
  std::vector<OrderingConstraint> orderings;
  Provenance provenance = Provenance::manual;
  std::optional<std::string> skeleton_id;

  const Step* find_step(std::string_view step_id) const;
  const Participant* find_participant(std::string_view participant_id) const;

  bool operator==(const Schema&) const = default;
};

/// Argumentless event-type sequence produced by the skeleton builder.
struct SkeletonSchema {
  std::string id;
  std::vector<std::string> events;
  double score = 0.0;

  bool operator==(const SkeletonSchema&) const = default;
};

enum class Severity { error, warning };

struct Issue {
  Severity severity = Severity::error;
  std::string location;  // step / participant / relation / ordering id
  std::string message;

  bool operator==(const Issue&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Issue> issues;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  json to_json() const;
};

std::string_view to_string(OrderingKind kind);
std::string_view to_string(Provenance p);
std::string_view to_string(Severity s);

/// True for Q followed by one or more digits.
bool is_fine_type_id(std::string_view id);

// Serialization. The canonical text form has sorted keys, so
// serialize(deserialize(serialize(s))) == serialize(s).
json schema_to_json(const Schema& schema);
Schema schema_from_json(const json& doc);
std::string serialize(const Schema& schema);
Schema deserialize(std::string_view text);
Schema load_schema_file(const std::filesystem::path& path);

json skeleton_to_json(const SkeletonSchema& skeleton);
SkeletonSchema skeleton_from_json(const json& doc);

/// Type checking against the ontology. Problems are reported, never thrown.
ValidationReport validate_schema(const Schema& schema, const Ontology& ontology);

struct TypeInference {
  std::map<std::string, TypeSet> types;  // participant id -> entity type ids
  std::vector<std::string> conflicts;    // participant ids whose set came out empty
};

/// Per participant: intersection of allowed types over every role it fills,
/// further intersected with declared coarse types when present.
TypeInference infer_participant_types(const Schema& schema, const Ontology& ontology);

/// Partially filled schema: one untyped step per skeleton event, in order,
/// and a single linear ordering over all of them.
Schema schema_from_skeleton(const SkeletonSchema& skeleton, const Ontology& ontology);

}  // namespace evschema
