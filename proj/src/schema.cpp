#include "evschema/schema.hpp"

#include <algorithm>

#include "evschema/error.hpp"

namespace evschema {

const Step* Schema::find_step(std::string_view step_id) const {
  for (const auto& s : steps)
    if (s.id == step_id) return &s;
  return nullptr;
}

const Participant* Schema::find_participant(std::string_view participant_id) const {
  for (const auto& p : participants)
    if (p.id == participant_id) return &p;
  return nullptr;
}

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(
      issues.begin(), issues.end(), [](const Issue& i) { return i.severity == Severity::error; }));
}

std::size_t ValidationReport::warning_count() const { return issues.size() - error_count(); }

json ValidationReport::to_json() const {
  json arr = json::array();
  for (const auto& i : issues)
    arr.push_back({{"severity", to_string(i.severity)},
                   {"location", i.location},
                   {"message", i.message}});
  return {{"ok", ok}, {"issues", std::move(arr)}};
}

std::string_view to_string(OrderingKind kind) {
  switch (kind) {
    case OrderingKind::linear: return "linear";
    case OrderingKind::unordered_group: return "unordered_group";
    case OrderingKind::exclusive_group: return "exclusive_group";
  }
  return "linear";
}

std::string_view to_string(Provenance p) {
  return p == Provenance::manual ? "manual" : "skeleton_fleshed";
}

std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

bool is_fine_type_id(std::string_view id) {
  if (id.size() < 2 || id.front() != 'Q') return false;
  return std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

namespace {

std::vector<std::string> string_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where, "expected an array of strings");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw ParseError(where + "/" + std::to_string(i), "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

TypeSet optional_set(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  auto list = string_list(*it, where + "/" + key);
  return {list.begin(), list.end()};
}

const json* optional_array(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  if (!it->is_array()) throw ParseError(where + "/" + key, "expected an array");
  return &*it;
}

OrderingKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "linear") return OrderingKind::linear;
  if (s == "unordered_group") return OrderingKind::unordered_group;
  if (s == "exclusive_group") return OrderingKind::exclusive_group;
  throw ParseError(where, "unknown ordering kind '" + s + "'");
}

}  // namespace

json schema_to_json(const Schema& schema) {
  json steps = json::array();
  for (const auto& s : schema.steps) {
    json fillers = json::object();
    for (const auto& [role, ids] : s.fillers) fillers[role] = ids;
    steps.push_back({{"id", s.id},
                     {"@type", s.event_type},
                     {"description", s.description},
                     {"fillers", std::move(fillers)}});
  }
  json parts = json::array();
  for (const auto& p : schema.participants)
    parts.push_back({{"id", p.id},
                     {"name", p.name},
                     {"coarse_types", p.coarse_types},
                     {"fine_types", p.fine_types}});
  json rels = json::array();
  for (const auto& r : schema.relations)
    rels.push_back({{"@type", r.relation_type}, {"subject", r.subject}, {"object", r.object}});
  json order = json::array();
  for (const auto& o : schema.orderings)
    order.push_back({{"kind", to_string(o.kind)}, {"members", o.members}});
  json prov{{"kind", to_string(schema.provenance)}};
  if (schema.skeleton_id) prov["skeleton"] = *schema.skeleton_id;
  return {{"id", schema.id},
          {"name", schema.name},
          {"description", schema.description},
          {"steps", std::move(steps)},
          {"participants", std::move(parts)},
          {"relations", std::move(rels)},
          {"order", std::move(order)},
          {"provenance", std::move(prov)}};
}

Schema schema_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "schema document must be an object");
  Schema s;
  s.id = require_string(doc, "id", "");
  s.name = require_string(doc, "name", "");
  s.description = optional_string(doc, "description", "");

  const json& steps = require_field(doc, "steps", "");
  if (!steps.is_array()) throw ParseError("/steps", "expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string where = "/steps/" + std::to_string(i);
    Step st;
    st.id = require_string(steps[i], "id", where);
    st.event_type = require_string(steps[i], "@type", where);
    st.description = optional_string(steps[i], "description", where);
    if (auto it = steps[i].find("fillers"); it != steps[i].end() && !it->is_null()) {
      if (!it->is_object()) throw ParseError(where + "/fillers", "expected an object");
      for (auto f = it->begin(); f != it->end(); ++f)
        st.fillers[f.key()] = string_list(f.value(), where + "/fillers/" + f.key());
    }
    s.steps.push_back(std::move(st));
  }

  if (const json* parts = optional_array(doc, "participants", "")) {
    for (std::size_t i = 0; i < parts->size(); ++i) {
      const std::string where = "/participants/" + std::to_string(i);
      const json& pj = (*parts)[i];
      s.participants.push_back({require_string(pj, "id", where), require_string(pj, "name", where),
                                optional_set(pj, "coarse_types", where),
                                optional_set(pj, "fine_types", where)});
    }
  }
  if (const json* rels = optional_array(doc, "relations", "")) {
    for (std::size_t i = 0; i < rels->size(); ++i) {
      const std::string where = "/relations/" + std::to_string(i);
      const json& rj = (*rels)[i];
      s.relations.push_back({require_string(rj, "@type", where),
                             require_string(rj, "subject", where),
                             require_string(rj, "object", where)});
    }
  }
  if (const json* order = optional_array(doc, "order", "")) {
    for (std::size_t i = 0; i < order->size(); ++i) {
      const std::string where = "/order/" + std::to_string(i);
      const json& oj = (*order)[i];
      s.orderings.push_back({parse_kind(require_string(oj, "kind", where), where + "/kind"),
                             string_list(require_field(oj, "members", where), where + "/members")});
    }
  }
  if (auto it = doc.find("provenance"); it != doc.end() && !it->is_null()) {
    const std::string kind = require_string(*it, "kind", "/provenance");
    if (kind == "manual") {
      s.provenance = Provenance::manual;
    } else if (kind == "skeleton_fleshed") {
      s.provenance = Provenance::skeleton_fleshed;
    } else {
      throw ParseError("/provenance/kind", "unknown provenance '" + kind + "'");
    }
    if (it->contains("skeleton")) s.skeleton_id = require_string(*it, "skeleton", "/provenance");
  }
  return s;
}

std::string serialize(const Schema& schema) { return dump_canonical(schema_to_json(schema)); }

Schema deserialize(std::string_view text) { return schema_from_json(parse_json_lenient(text)); }

Schema load_schema_file(const std::filesystem::path& path) {
  try {
    return deserialize(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + (e.location().empty() ? "" : ":" + e.location()), e.what());
  }
}

json skeleton_to_json(const SkeletonSchema& skeleton) {
  return {{"id", skeleton.id}, {"score", skeleton.score}, {"events", skeleton.events}};
}

SkeletonSchema skeleton_from_json(const json& doc) {
  SkeletonSchema k;
  k.id = require_string(doc, "id", "");
  k.events = string_list(require_field(doc, "events", ""), "/events");
  if (auto it = doc.find("score"); it != doc.end() && it->is_number()) k.score = it->get<double>();
  return k;
}

Schema schema_from_skeleton(const SkeletonSchema& skeleton, const Ontology& ontology) {
  if (skeleton.events.size() < 2)
    throw PreconditionError("skeleton '" + skeleton.id + "' needs at least two events");
  std::vector<std::string> problems;
  for (const auto& ev : skeleton.events)
    if (ontology.find_event(ev) == nullptr)
      problems.push_back("skeleton '" + skeleton.id + "': unknown event type '" + ev + "'");
  if (!problems.empty()) throw ValidationError(std::move(problems));

  Schema s;
  s.id = skeleton.id;
  s.name = skeleton.id;
  s.provenance = Provenance::skeleton_fleshed;
  s.skeleton_id = skeleton.id;
  OrderingConstraint chain{OrderingKind::linear, {}};
  for (std::size_t i = 0; i < skeleton.events.size(); ++i) {
    Step st;
    st.id = "step" + std::to_string(i + 1);
    st.event_type = skeleton.events[i];
    chain.members.push_back(st.id);
    s.steps.push_back(std::move(st));
  }
  s.orderings.push_back(std::move(chain));
  return s;
}

}  // namespace evschema
