#include <algorithm>
#include <functional>
#include <iterator>
#include <map>
#include <set>

#include "evschema/schema.hpp"

namespace evschema {

namespace {

TypeSet intersect(const TypeSet& a, const TypeSet& b) {
  TypeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

std::string list(const TypeSet& s) {
  std::string out = "{";
  for (const auto& t : s) out += (out.size() > 1 ? "," : "") + t;
  return out + "}";
}

class Reporter {
 public:
  void error(std::string loc, std::string msg) {
    issues.push_back({Severity::error, std::move(loc), std::move(msg)});
  }
  void warning(std::string loc, std::string msg) {
    issues.push_back({Severity::warning, std::move(loc), std::move(msg)});
  }
  std::vector<Issue> issues;
};

// Tarjan SCC over the "must precede" graph built from linear constraints.
std::vector<std::vector<std::string>> ordering_cycles(
    const std::map<std::string, std::set<std::string>>& edges) {
  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> cycles;
  int counter = 0;

  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    if (auto it = edges.find(v); it != edges.end()) {
      for (const auto& w : it->second) {
        if (!index.contains(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.contains(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
      } while (w != v);
      const bool self_loop = edges.contains(v) && edges.at(v).contains(v);
      if (comp.size() > 1 || self_loop) {
        std::sort(comp.begin(), comp.end());
        cycles.push_back(std::move(comp));
      }
    }
  };
  for (const auto& [v, _] : edges)
    if (!index.contains(v)) visit(v);
  return cycles;
}

}  // namespace

TypeInference infer_participant_types(const Schema& schema, const Ontology& ontology) {
  TypeInference out;
  const TypeSet universe = ontology.all_entity_type_ids();
  std::map<std::string, bool> constrained;
  for (const auto& p : schema.participants) {
    out.types[p.id] = p.coarse_types.empty() ? universe : p.coarse_types;
    constrained[p.id] = !p.coarse_types.empty();
  }
  for (const auto& step : schema.steps) {
    const EventTypeDef* ev = ontology.find_event(step.event_type);
    if (ev == nullptr) continue;
    for (const auto& [role_name, ids] : step.fillers) {
      const RoleSlot* role = ev->find_role(role_name);
      if (role == nullptr) continue;
      for (const auto& pid : ids) {
        auto it = out.types.find(pid);
        if (it == out.types.end()) continue;
        it->second = intersect(it->second, role->allowed_entity_types);
        constrained[pid] = true;
      }
    }
  }
  for (const auto& [pid, types] : out.types)
    if (types.empty() && constrained[pid]) out.conflicts.push_back(pid);
  return out;
}

ValidationReport validate_schema(const Schema& schema, const Ontology& ontology) {
  Reporter rep;
  const std::string& sid = schema.id;

  if (schema.steps.empty()) rep.error(sid, "schema has no steps");

  std::set<std::string> step_ids;
  for (const auto& st : schema.steps)
    if (!step_ids.insert(st.id).second) rep.error(st.id, "duplicate step id");

  std::set<std::string> part_ids;
  for (const auto& p : schema.participants) {
    if (!part_ids.insert(p.id).second) rep.error(p.id, "duplicate participant id");
    if (p.name.empty()) rep.error(p.id, "participant name is empty");
    if (p.coarse_types.empty()) rep.warning(p.id, "participant has no coarse types");
    for (const auto& t : p.coarse_types)
      if (ontology.find_entity(t) == nullptr) rep.error(p.id, "unknown entity type '" + t + "'");
    for (const auto& f : p.fine_types)
      if (!is_fine_type_id(f)) rep.error(p.id, "malformed fine type '" + f + "'");
  }

  std::set<std::string> referenced;
  std::set<std::string> disjoint_reported;
  for (const auto& st : schema.steps) {
    if (st.description.empty()) rep.warning(st.id, "step has no description");
    const EventTypeDef* ev = ontology.find_event(st.event_type);
    for (const auto& [role_name, ids] : st.fillers)
      for (const auto& pid : ids) referenced.insert(pid);
    if (ev == nullptr) {
      rep.error(st.id, "unknown event type '" + st.event_type + "'");
      continue;
    }
    for (const auto& [role_name, ids] : st.fillers) {
      const RoleSlot* role = ev->find_role(role_name);
      if (role == nullptr) {
        rep.error(st.id, "role '" + role_name + "' does not exist on " + ev->id);
        continue;
      }
      if (ids.size() > role->max_fillers)
        rep.error(st.id, "role '" + role_name + "' takes at most " +
                             std::to_string(role->max_fillers) + " filler(s), got " +
                             std::to_string(ids.size()));
      std::set<std::string> seen;
      for (const auto& pid : ids) {
        if (!seen.insert(pid).second) {
          rep.error(st.id, "role '" + role_name + "' lists participant '" + pid + "' twice");
          continue;
        }
        const Participant* p = schema.find_participant(pid);
        if (p == nullptr) {
          rep.error(st.id, "role '" + role_name + "' references unknown participant '" + pid + "'");
          continue;
        }
        if (!p->coarse_types.empty() &&
            intersect(p->coarse_types, role->allowed_entity_types).empty()) {
          rep.error(st.id, "role '" + role_name + "': participant '" + pid + "' types " +
                               list(p->coarse_types) + " are disjoint from allowed " +
                               list(role->allowed_entity_types));
          disjoint_reported.insert(pid);
        }
      }
    }
    // Under-filled roles mean "not fleshed out yet", which is a warning.
    for (const auto& role : ev->roles) {
      auto it = st.fillers.find(role.name);
      const std::size_t n = it == st.fillers.end() ? 0 : it->second.size();
      if (n < role.min_fillers)
        rep.warning(st.id, "role '" + role.name + "' needs at least " +
                               std::to_string(role.min_fillers) + " filler(s)");
    }
  }

  for (const auto& p : schema.participants)
    if (!referenced.contains(p.id)) rep.error(p.id, "participant fills no role");

  const TypeInference inferred = infer_participant_types(schema, ontology);
  for (const auto& pid : inferred.conflicts)
    if (!disjoint_reported.contains(pid))
      rep.error(pid, "no entity type satisfies every role this participant fills");

  for (std::size_t i = 0; i < schema.relations.size(); ++i) {
    const auto& r = schema.relations[i];
    const std::string loc = "relations/" + std::to_string(i);
    const RelationTypeDef* rt = ontology.find_relation(r.relation_type);
    if (rt == nullptr) rep.error(loc, "unknown relation type '" + r.relation_type + "'");
    const auto check_arg = [&](const std::string& pid, const TypeSet* allowed, const char* pos) {
      if (schema.find_participant(pid) == nullptr) {
        rep.error(loc, std::string(pos) + " '" + pid + "' is not a participant");
        return;
      }
      if (allowed == nullptr) return;
      const TypeSet& have = inferred.types.at(pid);
      if (!have.empty() && intersect(have, *allowed).empty())
        rep.error(loc, std::string(pos) + " '" + pid + "' types " + list(have) +
                           " are disjoint from allowed " + list(*allowed));
    };
    check_arg(r.subject, rt ? &rt->subject_types : nullptr, "subject");
    check_arg(r.object, rt ? &rt->object_types : nullptr, "object");
  }

  std::map<std::string, std::set<std::string>> precedes;
  std::map<std::string, std::size_t> exclusive_seen;
  for (std::size_t i = 0; i < schema.orderings.size(); ++i) {
    const auto& o = schema.orderings[i];
    const std::string loc = "order/" + std::to_string(i);
    if (o.members.size() < 2) rep.error(loc, "ordering constraint needs at least two steps");
    bool members_ok = true;
    for (const auto& m : o.members) {
      if (!step_ids.contains(m)) {
        rep.error(loc, "unknown step '" + m + "'");
        members_ok = false;
      }
    }
    if (o.kind == OrderingKind::exclusive_group) {
      for (const auto& m : std::set<std::string>(o.members.begin(), o.members.end())) {
        auto [it, fresh] = exclusive_seen.emplace(m, i);
        if (!fresh)
          rep.error(loc, "step '" + m + "' already belongs to exclusive group order/" +
                             std::to_string(it->second));
      }
    }
    if (o.kind == OrderingKind::linear && members_ok)
      for (std::size_t k = 0; k + 1 < o.members.size(); ++k)
        precedes[o.members[k]].insert(o.members[k + 1]);
  }
  for (const auto& cycle : ordering_cycles(precedes)) {
    std::string msg = "linear orderings form a cycle through";
    for (const auto& s : cycle) msg += " " + s;
    rep.error(cycle.front(), msg);
  }

  ValidationReport report;
  report.issues = std::move(rep.issues);
  report.ok = report.error_count() == 0;
  return report;
}

}  // namespace evschema
