#include "evschema/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "evschema/error.hpp"

namespace evschema {

std::string role_predicate(const std::string& event_type, const std::string& role) {
  return event_type + "/Slots/" + role;
}

std::map<Atom, double> flatten_document(const DocumentGraph& doc) {
  std::map<Atom, double> out;
  for (const auto& ev : doc.events) {
    out[Atom{ev.event_type, {ev.id}}] = ev.confidence;
    for (const auto& p : ev.participants)
      for (const auto& v : p.values) {
        auto [it, fresh] =
            out.emplace(Atom{role_predicate(ev.event_type, p.role), {ev.id, v.entity}}, v.confidence);
        if (!fresh) it->second = std::max(it->second, v.confidence);
      }
  }
  return out;
}

double rescale_confidence(double theta_raw, std::size_t matched_steps, std::size_t total_steps) {
  if (total_steps == 0) throw PreconditionError("schema has no steps");
  if (matched_steps > total_steps) throw PreconditionError("matched_steps exceeds total_steps");
  if (matched_steps == total_steps) return theta_raw;
  const double t = theta_raw * static_cast<double>(matched_steps) / static_cast<double>(total_steps);
  // Reported at 1e-12 resolution: 0.8 * 3 / 4 is a rounding tie in binary and
  // would otherwise come out one ulp above 0.6.
  return std::round(t * 1e12) / 1e12;
}

double combine_event_probability(std::span<const double> thetas) {
  double miss = 1.0;
  for (double t : thetas) miss *= 1.0 - t;
  return 1.0 - miss;
}

namespace {

struct StepShape {
  std::vector<std::pair<std::string, std::string>> fills;  // (role, participant)
  std::vector<std::string> participants;                   // unique, fill order
};

std::vector<StepShape> step_shapes(const Schema& schema) {
  std::vector<StepShape> out;
  for (const auto& st : schema.steps) {
    StepShape sh;
    for (const auto& [role, ids] : st.fillers)
      for (const auto& pid : ids) {
        sh.fills.emplace_back(role, pid);
        if (std::find(sh.participants.begin(), sh.participants.end(), pid) == sh.participants.end())
          sh.participants.push_back(pid);
      }
    out.push_back(std::move(sh));
  }
  return out;
}

class Observations {
 public:
  Observations(const DocumentGraph& doc, const GroundingCaps& caps)
      : flat_(flatten_document(doc)), caps_(caps) {}

  double truth(const Atom& a) const {
    if (std::find(a.args.begin(), a.args.end(), kUnkEvent) != a.args.end())
      return caps_.unk_event_truth;
    if (std::find(a.args.begin(), a.args.end(), kUnkEntity) != a.args.end())
      return caps_.unk_entity_truth;
    return evidence(a);
  }

  // Document support only: 0 for anything on an UNK constant.
  double evidence(const Atom& a) const {
    auto it = flat_.find(a);
    return it == flat_.end() ? 0.0 : it->second;
  }

 private:
  std::map<Atom, double> flat_;
  GroundingCaps caps_;
};

Atom event_atom(const Step& st, const std::string& ev) { return {st.event_type, {ev}}; }

Atom role_atom(const Step& st, const std::string& role, const std::string& ev,
               const std::string& entity) {
  return {role_predicate(st.event_type, role), {ev, entity}};
}

struct Partial {
  Binding binding;
  std::set<std::string> used_events;
  double score = 0.0;
};

}  // namespace

Grounding ground_schema(const Schema& schema, const DocumentGraph& doc, const GroundingCaps& caps) {
  if (schema.steps.empty()) throw PreconditionError("schema '" + schema.id + "' has no steps");
  if (caps.max_bindings == 0) throw PreconditionError("max_bindings must be positive");
  const Observations obs(doc, caps);
  const auto shapes = step_shapes(schema);
  bool truncated = false;

  std::vector<Partial> beam(1);
  for (std::size_t k = 0; k < schema.steps.size(); ++k) {
    const Step& st = schema.steps[k];
    const StepShape& sh = shapes[k];
    std::vector<const ExtractedEvent*> events;
    for (const auto& ev : doc.events)
      if (ev.event_type == st.event_type) events.push_back(&ev);

    std::vector<Partial> next;
    for (const auto& part : beam) {
      std::vector<std::string> choices;
      for (const auto* ev : events)
        if (!part.used_events.contains(ev->id)) choices.push_back(ev->id);
      choices.push_back(kUnkEvent);

      for (const auto& ev : choices) {
        std::vector<std::string> fresh;
        std::vector<std::vector<std::string>> options;
        for (const auto& pid : sh.participants) {
          if (part.binding.participants.contains(pid)) continue;
          std::vector<std::string> cands;
          if (ev != kUnkEvent) {
            for (const auto& e : doc.events) {
              if (e.id != ev) continue;
              for (const auto& [role, fp] : sh.fills) {
                if (fp != pid) continue;
                for (const auto& p : e.participants)
                  if (p.role == role)
                    for (const auto& v : p.values)
                      if (v.confidence > 0.0 &&
                          std::find(cands.begin(), cands.end(), v.entity) == cands.end())
                        cands.push_back(v.entity);
              }
            }
          }
          cands.push_back(kUnkEntity);
          fresh.push_back(pid);
          options.push_back(std::move(cands));
        }

        std::set<std::string> taken;
        for (const auto& [pid, ent] : part.binding.participants)
          if (ent != kUnkEntity) taken.insert(ent);

        std::vector<std::size_t> pick(options.size(), 0);
        const auto advance = [&] {
          std::size_t i = 0;
          while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
          return i < pick.size();
        };
        do {
          // distinct participants never share a real entity
          bool clash = false;
          std::set<std::string> now = taken;
          for (std::size_t i = 0; i < fresh.size() && !clash; ++i) {
            const std::string& ent = options[i][pick[i]];
            if (ent != kUnkEntity) clash = !now.insert(ent).second;
          }
          if (clash) continue;
          Partial ext = part;
          ext.binding.step_events.push_back(ev);
          if (ev != kUnkEvent) ext.used_events.insert(ev);
          for (std::size_t i = 0; i < fresh.size(); ++i)
            ext.binding.participants[fresh[i]] = options[i][pick[i]];
          double s = obs.evidence(event_atom(st, ev));
          for (const auto& [role, pid] : sh.fills)
            s += obs.evidence(role_atom(st, role, ev, ext.binding.participants.at(pid)));
          ext.score += s;
          next.push_back(std::move(ext));
        } while (advance());
      }
    }
    std::stable_sort(next.begin(), next.end(),
                     [](const Partial& a, const Partial& b) { return a.score > b.score; });
    if (next.size() > caps.max_bindings) {
      next.resize(caps.max_bindings);
      truncated = true;
    }
    beam = std::move(next);
  }

  Grounding g;
  SoftLogicProgram& prog = g.program;
  prog.truncated = truncated;
  std::set<Atom> open;
  std::set<std::pair<std::vector<Atom>, Atom>> schema_rules;
  const auto add_target = [&](const Atom& a) {
    if (!open.insert(a).second) return false;
    prog.targets.push_back(a);
    prog.rules.push_back({{a}, std::nullopt, kNegativePriorWeight});
    return true;
  };
  const auto observe = [&](const Atom& a) { prog.observed.emplace(a, obs.truth(a)); };

  for (const auto& part : beam) {
    const Binding& b = part.binding;
    std::vector<Atom> step_atoms;
    for (std::size_t k = 0; k < schema.steps.size(); ++k) {
      const Step& st = schema.steps[k];
      const std::string& ev = b.step_events[k];
      Atom head{"step:" + schema.id + "/" + st.id, {ev}};
      for (const auto& pid : shapes[k].participants) head.args.push_back(b.participants.at(pid));
      if (add_target(head)) {
        GroundRule rule{{event_atom(st, ev)}, head, kStepRuleWeight};
        for (const auto& [role, pid] : shapes[k].fills)
          rule.body.push_back(role_atom(st, role, ev, b.participants.at(pid)));
        for (const auto& a : rule.body) observe(a);
        prog.rules.push_back(std::move(rule));
      }
      step_atoms.push_back(std::move(head));
    }
    Atom schema_atom{"schema:" + schema.id, b.step_events};
    add_target(schema_atom);
    if (schema_rules.emplace(step_atoms, schema_atom).second)
      prog.rules.push_back({step_atoms, schema_atom, kSchemaRuleWeight});
    g.bindings.push_back(b);
    g.schema_atoms.push_back(std::move(schema_atom));
  }
  return g;
}

MatchResult match_schema(const Schema& schema, const DocumentGraph& doc, const GroundingCaps& caps,
                         const SolverOptions& solver) {
  const Grounding g = ground_schema(schema, doc, caps);
  const SolveResult sol = solve(g.program, solver);

  const std::size_t total = schema.steps.size();
  std::size_t best = 0;
  double best_raw = 0.0, best_theta = -1.0;
  std::size_t best_matched = 0;
  for (std::size_t i = 0; i < g.bindings.size(); ++i) {
    const double raw = std::clamp(sol.truths.at(g.schema_atoms[i]), 0.0, 1.0);
    const auto matched = static_cast<std::size_t>(
        std::count_if(g.bindings[i].step_events.begin(), g.bindings[i].step_events.end(),
                      [](const std::string& e) { return e != kUnkEvent; }));
    const double theta = rescale_confidence(raw, matched, total);
    const bool higher = theta > best_theta + 1e-9;
    const bool tie = std::abs(theta - best_theta) <= 1e-9;
    if (higher || (tie && matched > best_matched)) {
      best = i;
      best_raw = raw;
      best_theta = theta;
      best_matched = matched;
    }
  }

  MatchResult m;
  m.schema_id = schema.id;
  m.total_steps = total;
  m.matched_steps = best_matched;
  m.theta_raw = best_raw;
  m.theta = rescale_confidence(m.theta_raw, m.matched_steps, m.total_steps);
  m.bindings = g.bindings[best].participants;
  for (const auto& p : schema.participants) m.bindings.try_emplace(p.id, kUnkEntity);
  for (std::size_t k = 0; k < schema.steps.size(); ++k)
    if (g.bindings[best].step_events[k] == kUnkEvent)
      m.predicted_events.emplace_back(schema.steps[k].event_type, m.theta);
  m.truncated = g.program.truncated;
  m.solver_iterations = sol.iterations;
  m.solver_objective = sol.objective;
  m.solver_converged = sol.converged;
  return m;
}

SchemaIndex::SchemaIndex(std::span<const Schema> library) : n_schemas_(library.size()) {
  for (std::size_t s = 0; s < library.size(); ++s) {
    std::map<std::string, std::size_t> tf;
    for (const auto& st : library[s].steps) ++tf[st.event_type];
    for (const auto& [t, c] : tf) postings_[t].emplace_back(s, c);
  }
}

std::vector<std::pair<std::size_t, double>> SchemaIndex::score(const EventMultiset& doc) const {
  std::map<std::size_t, double> acc;
  for (const auto& [type, tf_d] : doc.counts) {
    auto it = postings_.find(type);
    if (it == postings_.end()) continue;
    const double idf =
        std::log(1.0 + static_cast<double>(n_schemas_) / static_cast<double>(it->second.size()));
    for (const auto& [s, tf_s] : it->second)
      acc[s] += static_cast<double>(tf_d) * static_cast<double>(tf_s) * idf * idf;
  }
  return {acc.begin(), acc.end()};
}

std::vector<const Schema*> prefilter(std::span<const Schema> library, const SchemaIndex& index,
                                     const DocumentGraph& doc, std::size_t k) {
  if (index.size() == 0) throw PreconditionError("schema index is empty");
  auto scored = index.score(event_multiset(doc));
  std::stable_sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return library[a.first].id < library[b.first].id;
  });
  if (scored.size() > k) scored.resize(k);
  std::vector<const Schema*> out;
  for (const auto& [s, _] : scored) out.push_back(&library[s]);
  return out;
}

namespace {

DocumentMatches infer_document(std::span<const Schema> library, const SchemaIndex& index,
                               const DocumentGraph& doc, const InferenceOptions& options) {
  DocumentMatches out;
  out.doc_id = doc.doc_id;
  out.n_events = doc.events.size();
  auto chosen = prefilter(library, index, doc, options.top_k);
  std::sort(chosen.begin(), chosen.end());  // library order (same array)
  std::map<std::string, std::vector<double>> support;
  for (const Schema* s : chosen) {
    MatchResult m = match_schema(*s, doc, options.caps, options.solver);
    for (const auto& [type, p] : m.predicted_events) support[type].push_back(p);
    out.matches.push_back(std::move(m));
  }
  for (const auto& [type, thetas] : support)
    out.predicted_events[type] = combine_event_probability(thetas);
  return out;
}

}  // namespace

std::vector<DocumentMatches> infer_corpus_serial(std::span<const Schema> library,
                                                 std::span<const DocumentGraph> docs,
                                                 const InferenceOptions& options) {
  const SchemaIndex index(library);
  std::vector<DocumentMatches> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(infer_document(library, index, d, options));
  return out;
}

std::vector<DocumentMatches> infer_corpus(std::span<const Schema> library,
                                          std::span<const DocumentGraph> docs,
                                          const InferenceOptions& options) {
  const SchemaIndex index(library);
  if (index.size() == 0) throw PreconditionError("schema index is empty");
  std::vector<DocumentMatches> out(docs.size());
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = infer_document(library, index, docs[i], options);
  return out;
}

json match_to_json(const MatchResult& m) {
  json pred = json::array();
  for (const auto& [t, p] : m.predicted_events) pred.push_back({{"event_type", t}, {"probability", p}});
  return {{"schema_id", m.schema_id},
          {"theta", m.theta},
          {"theta_raw", m.theta_raw},
          {"matched_steps", m.matched_steps},
          {"total_steps", m.total_steps},
          {"bindings", m.bindings},
          {"predicted_events", std::move(pred)},
          {"truncated", m.truncated}};
}

MatchResult match_from_json(const json& j) {
  MatchResult m;
  m.schema_id = require_string(j, "schema_id", "");
  m.theta = require_number(j, "theta", "");
  m.theta_raw = j.value("theta_raw", m.theta);
  m.matched_steps = j.value("matched_steps", std::size_t{0});
  m.total_steps = j.value("total_steps", std::size_t{0});
  if (j.contains("bindings")) m.bindings = j["bindings"].get<std::map<std::string, std::string>>();
  if (j.contains("predicted_events"))
    for (const auto& p : j["predicted_events"])
      m.predicted_events.emplace_back(p.at("event_type").get<std::string>(),
                                      p.at("probability").get<double>());
  m.truncated = j.value("truncated", false);
  return m;
}

json document_matches_to_json(const DocumentMatches& d) {
  json ms = json::array();
  for (const auto& m : d.matches) ms.push_back(match_to_json(m));
  return {{"doc_id", d.doc_id}, {"n_events", d.n_events}, {"matches", std::move(ms)}, {"predicted_events", d.predicted_events}};
}

DocumentMatches document_matches_from_json(const json& j) {
  DocumentMatches d;
  d.doc_id = require_string(j, "doc_id", "");
  d.n_events = j.value("n_events", std::size_t{0});
  for (const auto& m : require_field(j, "matches", "")) d.matches.push_back(match_from_json(m));
  if (j.contains("predicted_events"))
    d.predicted_events = j["predicted_events"].get<std::map<std::string, double>>();
  return d;
}

}  // namespace evschema
