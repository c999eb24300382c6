#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evschema/json_io.hpp"

namespace evschema {

using TypeSet = std::set<std::string>;

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();
inline constexpr int kOntologyFormatVersion = 1;
inline constexpr std::string_view kRootCategory = "root";

struct EntityTypeDef {
  std::string id;
  std::string label;
  std::string description;
};

struct RoleSlot {
  std::string name;
  TypeSet allowed_entity_types;
  std::size_t min_fillers = 0;
  std::size_t max_fillers = kUnbounded;
};

struct EventTypeDef {
  std::string id;
  std::vector<std::string> category_path;
  std::string label;
  std::vector<RoleSlot> roles;

  const RoleSlot* find_role(std::string_view name) const;
  /// Dotted id of the leaf category, e.g. "Medical.Vaccinate".
  std::string category() const;
};

struct RelationTypeDef {
  std::string id;
  std::string label;
  TypeSet subject_types;
  TypeSet object_types;
};

struct CategoryNode {
  std::string id;  // dotted path; the root is "root"
  std::string name;
  std::vector<std::size_t> children;
  std::vector<std::size_t> events;  // indices into Ontology::event_types()
};

/// Event/entity/relation type system. Immutable once loaded.
class Ontology {
 public:
  /// Builds and cross-checks. Throws ParseError for shape problems and
  /// ValidationError listing every dangling reference or duplicate id.
  static Ontology from_json(const json& doc);

  json to_json() const;

  const std::vector<EventTypeDef>& event_types() const { return events_; }
  const std::vector<EntityTypeDef>& entity_types() const { return entities_; }
  const std::vector<RelationTypeDef>& relation_types() const { return relations_; }
  const std::vector<CategoryNode>& category_tree() const { return categories_; }

  const EventTypeDef* find_event(std::string_view id) const;
  const EntityTypeDef* find_entity(std::string_view id) const;
  const RelationTypeDef* find_relation(std::string_view id) const;
  const CategoryNode* find_category(std::string_view id) const;

  TypeSet all_entity_type_ids() const;

 private:
  std::vector<EventTypeDef> events_;
  std::vector<EntityTypeDef> entities_;
  std::vector<RelationTypeDef> relations_;
  std::vector<CategoryNode> categories_;
  std::unordered_map<std::string, std::size_t> event_index_;
  std::unordered_map<std::string, std::size_t> entity_index_;
  std::unordered_map<std::string, std::size_t> relation_index_;
  std::unordered_map<std::string, std::size_t> category_index_;
};

Ontology load_ontology(std::istream& source);
Ontology load_ontology(std::string_view text);
Ontology load_ontology_file(const std::filesystem::path& path);

/// Event types whose category path lies under `category` (a dotted category
/// id, or "root" for everything), in definition order. Throws on unknown ids.
std::vector<const EventTypeDef*> event_types_in_category(const Ontology& ontology,
                                                         std::string_view category);

}  // namespace evschema
