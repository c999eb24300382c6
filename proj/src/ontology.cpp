#include "evschema/ontology.hpp"

#include <istream>
#include <iterator>
#include <sstream>

#include "evschema/error.hpp"

namespace evschema {

const RoleSlot* EventTypeDef::find_role(std::string_view name) const {
  for (const auto& r : roles)
    if (r.name == name) return &r;
  return nullptr;
}

std::string EventTypeDef::category() const {
  std::string out;
  for (const auto& seg : category_path) {
    if (!out.empty()) out += '.';
    out += seg;
  }
  return out;
}

namespace {

TypeSet parse_type_set(const json& obj, const char* key, const std::string& where) {
  const json& arr = require_field(obj, key, where);
  if (!arr.is_array()) throw ParseError(where + "/" + key, "expected an array");
  TypeSet out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string())
      throw ParseError(where + "/" + key + "/" + std::to_string(i), "expected a string");
    out.insert(arr[i].get<std::string>());
  }
  return out;
}

std::size_t parse_count(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) throw ParseError(where, "expected a non-negative integer");
  return v.get<std::size_t>();
}

RoleSlot parse_role(const json& j, const std::string& where) {
  RoleSlot r;
  r.name = require_string(j, "name", where);
  r.allowed_entity_types = parse_type_set(j, "types", where);
  if (auto it = j.find("min"); it != j.end()) r.min_fillers = parse_count(*it, where + "/min");
  if (auto it = j.find("max"); it != j.end() && !it->is_null()) {
    if (it->is_string() && *it == "unbounded") {
      r.max_fillers = kUnbounded;
    } else {
      r.max_fillers = parse_count(*it, where + "/max");
    }
  }
  return r;
}

const json& require_array(const json& doc, const char* key) {
  const json& arr = require_field(doc, key, "");
  if (!arr.is_array()) throw ParseError(std::string("/") + key, "expected an array");
  return arr;
}

void check_types(const TypeSet& types, const std::unordered_map<std::string, std::size_t>& known,
                 const std::string& where, std::vector<std::string>& problems) {
  for (const auto& t : types)
    if (!known.contains(t)) problems.push_back(where + ": unknown entity type '" + t + "'");
}

}  // namespace

Ontology Ontology::from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "ontology document must be an object");
  const json& version = require_field(doc, "format_version", "");
  if (!version.is_number_integer() || version.get<int>() != kOntologyFormatVersion)
    throw ParseError("/format_version",
                     "unsupported format version (expected " +
                         std::to_string(kOntologyFormatVersion) + ")");

  Ontology o;
  std::vector<std::string> problems;

  const json& ents = require_array(doc, "entities");
  for (std::size_t i = 0; i < ents.size(); ++i) {
    const std::string where = "/entities/" + std::to_string(i);
    EntityTypeDef e{require_string(ents[i], "id", where),
                    optional_string(ents[i], "label", where),
                    optional_string(ents[i], "description", where)};
    if (e.id.empty()) {
      problems.push_back(where + ": empty entity type id");
      continue;
    }
    if (!o.entity_index_.emplace(e.id, o.entities_.size()).second) {
      problems.push_back(where + ": duplicate entity type id '" + e.id + "'");
      continue;
    }
    o.entities_.push_back(std::move(e));
  }

  const json& evs = require_array(doc, "events");
  for (std::size_t i = 0; i < evs.size(); ++i) {
    const std::string where = "/events/" + std::to_string(i);
    EventTypeDef ev;
    ev.id = require_string(evs[i], "id", where);
    ev.label = optional_string(evs[i], "label", where);
    const json& cat = require_field(evs[i], "category", where);
    if (!cat.is_array()) throw ParseError(where + "/category", "expected an array");
    for (const auto& seg : cat) {
      if (!seg.is_string()) throw ParseError(where + "/category", "expected strings");
      ev.category_path.push_back(seg.get<std::string>());
    }
    if (auto it = evs[i].find("roles"); it != evs[i].end()) {
      if (!it->is_array()) throw ParseError(where + "/roles", "expected an array");
      for (std::size_t r = 0; r < it->size(); ++r)
        ev.roles.push_back(parse_role((*it)[r], where + "/roles/" + std::to_string(r)));
    }

    const std::string label = "event type '" + ev.id + "'";
    if (ev.id.empty()) problems.push_back(where + ": empty event type id");
    if (ev.category_path.empty()) problems.push_back(label + ": empty category path");
    for (const auto& seg : ev.category_path)
      if (seg.empty() || seg.find('.') != std::string::npos)
        problems.push_back(label + ": invalid category segment '" + seg + "'");
    if (!ev.category_path.empty() && ev.category_path.front() == kRootCategory)
      problems.push_back(label + ": category name 'root' is reserved");
    TypeSet role_names;
    for (const auto& r : ev.roles) {
      const std::string rl = label + " role '" + r.name + "'";
      if (r.name.empty()) problems.push_back(label + ": empty role name");
      if (!role_names.insert(r.name).second) problems.push_back(rl + ": duplicate role name");
      if (r.allowed_entity_types.empty()) problems.push_back(rl + ": no allowed entity types");
      check_types(r.allowed_entity_types, o.entity_index_, rl, problems);
      if (r.min_fillers > r.max_fillers) problems.push_back(rl + ": min_fillers > max_fillers");
    }
    if (ev.id.empty()) continue;
    if (!o.event_index_.emplace(ev.id, o.events_.size()).second) {
      problems.push_back(where + ": duplicate event type id '" + ev.id + "'");
      continue;
    }
    o.events_.push_back(std::move(ev));
  }

  const json& rels = require_array(doc, "relations");
  for (std::size_t i = 0; i < rels.size(); ++i) {
    const std::string where = "/relations/" + std::to_string(i);
    if (rels[i].contains("arguments") && rels[i]["arguments"].is_array() &&
        rels[i]["arguments"].size() != 2)
      problems.push_back(where + ": relations are binary");
    RelationTypeDef rel{require_string(rels[i], "id", where),
                        optional_string(rels[i], "label", where),
                        parse_type_set(rels[i], "subject_types", where),
                        parse_type_set(rels[i], "object_types", where)};
    const std::string label = "relation type '" + rel.id + "'";
    if (rel.subject_types.empty() || rel.object_types.empty())
      problems.push_back(label + ": both argument positions need allowed types");
    check_types(rel.subject_types, o.entity_index_, label + " subject", problems);
    check_types(rel.object_types, o.entity_index_, label + " object", problems);
    if (rel.id.empty()) {
      problems.push_back(where + ": empty relation type id");
      continue;
    }
    if (!o.relation_index_.emplace(rel.id, o.relations_.size()).second) {
      problems.push_back(where + ": duplicate relation type id '" + rel.id + "'");
      continue;
    }
    o.relations_.push_back(std::move(rel));
  }

  // Category tree: paths are unique by construction, so it is a tree rooted at
  // "root". Events may only hang off leaf categories.
  o.categories_.push_back({std::string(kRootCategory), std::string(kRootCategory), {}, {}});
  o.category_index_.emplace(std::string(kRootCategory), 0);
  for (std::size_t e = 0; e < o.events_.size(); ++e) {
    std::size_t node = 0;
    std::string path;
    for (const auto& seg : o.events_[e].category_path) {
      path = path.empty() ? seg : path + "." + seg;
      auto [it, inserted] = o.category_index_.emplace(path, o.categories_.size());
      if (inserted) {
        o.categories_.push_back({path, seg, {}, {}});
        o.categories_[node].children.push_back(it->second);
      }
      node = it->second;
    }
    if (node != 0) o.categories_[node].events.push_back(e);
  }
  for (const auto& c : o.categories_)
    if (!c.children.empty() && !c.events.empty())
      problems.push_back("category '" + c.id +
                         "' holds event types but also has subcategories; events must sit "
                         "on leaf categories");

  if (!problems.empty()) throw ValidationError(std::move(problems));
  return o;
}

json Ontology::to_json() const {
  json ents = json::array();
  for (const auto& e : entities_) {
    json j{{"id", e.id}, {"label", e.label}};
    if (!e.description.empty()) j["description"] = e.description;
    ents.push_back(std::move(j));
  }
  json evs = json::array();
  for (const auto& ev : events_) {
    json roles = json::array();
    for (const auto& r : ev.roles) {
      json jr{{"name", r.name}, {"types", r.allowed_entity_types}, {"min", r.min_fillers}};
      if (r.max_fillers == kUnbounded) {
        jr["max"] = "unbounded";
      } else {
        jr["max"] = r.max_fillers;
      }
      roles.push_back(std::move(jr));
    }
    evs.push_back({{"id", ev.id}, {"category", ev.category_path}, {"label", ev.label},
                   {"roles", std::move(roles)}});
  }
  json rels = json::array();
  for (const auto& r : relations_)
    rels.push_back({{"id", r.id},
                    {"label", r.label},
                    {"subject_types", r.subject_types},
                    {"object_types", r.object_types}});
  return {{"format_version", kOntologyFormatVersion},
          {"entities", std::move(ents)},
          {"events", std::move(evs)},
          {"relations", std::move(rels)}};
}

const EventTypeDef* Ontology::find_event(std::string_view id) const {
  auto it = event_index_.find(std::string(id));
  return it == event_index_.end() ? nullptr : &events_[it->second];
}

const EntityTypeDef* Ontology::find_entity(std::string_view id) const {
  auto it = entity_index_.find(std::string(id));
  return it == entity_index_.end() ? nullptr : &entities_[it->second];
}

const RelationTypeDef* Ontology::find_relation(std::string_view id) const {
  auto it = relation_index_.find(std::string(id));
  return it == relation_index_.end() ? nullptr : &relations_[it->second];
}

const CategoryNode* Ontology::find_category(std::string_view id) const {
  auto it = category_index_.find(std::string(id));
  return it == category_index_.end() ? nullptr : &categories_[it->second];
}

TypeSet Ontology::all_entity_type_ids() const {
  TypeSet out;
  for (const auto& e : entities_) out.insert(e.id);
  return out;
}

Ontology load_ontology(std::string_view text) {
  return Ontology::from_json(parse_json_lenient(text));
}

Ontology load_ontology(std::istream& source) {
  std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  return load_ontology(text);
}

Ontology load_ontology_file(const std::filesystem::path& path) {
  return load_ontology(read_file(path));
}

std::vector<const EventTypeDef*> event_types_in_category(const Ontology& ontology,
                                                         std::string_view category) {
  const CategoryNode* node = ontology.find_category(category);
  if (node == nullptr) throw PreconditionError("unknown category '" + std::string(category) + "'");
  std::vector<const EventTypeDef*> out;
  if (node->id == kRootCategory) {
    for (const auto& ev : ontology.event_types()) out.push_back(&ev);
    return out;
  }
  const std::string prefix = node->id + ".";
  for (const auto& ev : ontology.event_types()) {
    const std::string cat = ev.category();
    if (cat == node->id || cat.starts_with(prefix)) out.push_back(&ev);
  }
  return out;
}

}  // namespace evschema
