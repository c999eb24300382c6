#include "evschema/intrusion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "evschema/error.hpp"
#include "evschema/json_io.hpp"

namespace evschema {

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

double geometric_weight(std::span<const double> overlaps) {
  if (overlaps.empty()) return 1.0;
  double log_sum = 0.0;
  for (double j : overlaps) {
    if (j <= 0.0) return 0.0;
    log_sum += std::log(j);
  }
  return std::exp(log_sum / static_cast<double>(overlaps.size()));
}

namespace {

const std::set<std::string>& lookup(const ParticipantSets& sets, const std::string& id) {
  static const std::set<std::string> empty;
  auto it = sets.find(id);
  return it == sets.end() ? empty : it->second;
}

double map_weight(const ParticipantMap& map, const ParticipantSets& xs, const ParticipantSets& ys) {
  std::vector<double> js;
  js.reserve(map.size());
  for (const auto& [x, y] : map) js.push_back(jaccard(lookup(xs, x), lookup(ys, y)));
  return geometric_weight(js);
}

}  // namespace

double library_weight(const ParticipantMap& map, const ParticipantSets& types_of_x,
                      const ParticipantSets& types_of_y) {
  return map_weight(map, types_of_x, types_of_y);
}

double corpus_weight(const ParticipantMap& map, const ParticipantSets& ent_of_x,
                     const ParticipantSets& ent_of_y) {
  return map_weight(map, ent_of_x, ent_of_y);
}

ParticipantSets coarse_types_of(const Schema& schema) {
  ParticipantSets out;
  for (const auto& p : schema.participants) out[p.id] = p.coarse_types;
  return out;
}

std::vector<std::string> step_participants(const Step& step) {
  std::vector<std::string> out;
  for (const auto& [role, ids] : step.fillers)
    for (const auto& id : ids)
      if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  return out;
}

namespace {

/// Complete maps from[i] -> one of options[i]; all of them when the product
/// is at most cap, otherwise cap distinct ones drawn uniformly.
std::vector<ParticipantMap> enumerate_product(std::span<const std::string> from,
                                              const std::vector<std::vector<std::string>>& options,
                                              std::size_t cap, Rng& rng) {
  std::vector<ParticipantMap> out;
  double product = 1.0;
  for (const auto& o : options) {
    if (o.empty()) return out;
    product *= static_cast<double>(o.size());
  }
  if (product <= static_cast<double>(cap)) {
    std::vector<std::size_t> pick(from.size(), 0);
    while (true) {
      ParticipantMap m;
      for (std::size_t i = 0; i < from.size(); ++i) m[from[i]] = options[i][pick[i]];
      out.push_back(std::move(m));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
    return out;
  }
  std::set<std::vector<std::size_t>> seen;
  const std::size_t max_attempts = 50 * cap;
  for (std::size_t a = 0; a < max_attempts && seen.size() < cap; ++a) {
    std::vector<std::size_t> pick(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) pick[i] = rng.below(options[i].size());
    if (!seen.insert(pick).second) continue;
    ParticipantMap m;
    for (std::size_t i = 0; i < from.size(); ++i) m[from[i]] = options[i][pick[i]];
    out.push_back(std::move(m));
  }
  return out;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool token_at(const std::string& text_lower, std::size_t i, const std::string& name_lower) {
  if (name_lower.empty() || i + name_lower.size() > text_lower.size()) return false;
  if (i > 0 && is_word(text_lower[i - 1])) return false;
  const std::size_t end = i + name_lower.size();
  if (end < text_lower.size() && is_word(text_lower[end])) return false;
  return text_lower.compare(i, name_lower.size(), name_lower) == 0;
}

bool contains_token(const std::string& text, const std::string& name) {
  const std::string t = lower(text), n = lower(name);
  for (std::size_t i = 0; i < t.size(); ++i)
    if (token_at(t, i, n)) return true;
  return false;
}

}  // namespace

std::vector<ParticipantMap> enumerate_maps(std::span<const std::string> from,
                                           std::span<const std::string> to, std::size_t cap,
                                           Rng& rng) {
  const std::vector<std::vector<std::string>> options(
      from.size(), std::vector<std::string>(to.begin(), to.end()));
  return enumerate_product(from, options, cap, rng);
}

Step remap_step(const Step& step, const ParticipantMap& map) {
  Step out = step;
  for (auto& [role, ids] : out.fillers)
    for (auto& id : ids) {
      auto it = map.find(id);
      if (it != map.end()) id = it->second;
    }
  return out;
}

bool duplicates_existing_step(const Schema& host, const Step& remapped) {
  const auto as_sets = [](const Step& s) {
    std::map<std::string, std::set<std::string>> out;
    for (const auto& [role, ids] : s.fillers)
      if (!ids.empty()) out[role].insert(ids.begin(), ids.end());
    return out;
  };
  const auto target = as_sets(remapped);
  return std::any_of(host.steps.begin(), host.steps.end(), [&](const Step& s) {
    return s.event_type == remapped.event_type && as_sets(s) == target;
  });
}

RenameResult rename_text(const std::string& text,
                         const std::vector<std::pair<std::string, std::string>>& names,
                         const std::vector<std::string>& check) {
  std::vector<std::pair<std::string, std::string>> order;  // (lowered source, replacement)
  for (const auto& [x, y] : names)
    if (!x.empty()) order.emplace_back(lower(x), y);
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
    return a.first < b.first;
  });

  const std::string tl = lower(text);
  RenameResult r;
  std::size_t i = 0;
  while (i < text.size()) {
    bool replaced = false;
    for (const auto& [x, y] : order) {
      if (token_at(tl, i, x)) {
        r.text += y;
        i += x.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) r.text += text[i++];
  }
  for (const auto& name : check)
    if (contains_token(r.text, name)) r.residual.push_back(name);
  return r;
}

std::string step_text(const Step& step) {
  return step.description.empty() ? step.event_type : step.description;
}

RenameResult rename_step(const Step& e, const ParticipantMap& map, const Schema& source,
                         const Schema& host) {
  std::vector<std::pair<std::string, std::string>> names;
  std::set<std::string> seen;
  for (const auto& [x, y] : map) {
    const Participant* px = source.find_participant(x);
    const Participant* py = host.find_participant(y);
    if (!px || !py || px->name.empty()) continue;
    if (seen.insert(lower(px->name)).second) names.emplace_back(px->name, py->name);
  }
  std::set<std::string> host_names;
  for (const auto& p : host.participants) host_names.insert(lower(p.name));
  std::vector<std::string> check;
  for (const auto& p : source.participants)
    if (!p.name.empty() && !host_names.contains(lower(p.name))) check.push_back(p.name);
  return rename_text(step_text(e), names, check);
}

std::string to_string(IntrusionMethod m) { return m == IntrusionMethod::Library ? "library" : "corpus"; }

IntrusionMethod parse_intrusion_method(const std::string& s) {
  if (s == "library") return IntrusionMethod::Library;
  if (s == "corpus") return IntrusionMethod::Corpus;
  throw ParseError("method", "expected library or corpus, got '" + s + "'");
}

namespace {

const Schema* find_schema(std::span<const Schema> library, const std::string& id) {
  for (const auto& s : library)
    if (s.id == id) return &s;
  return nullptr;
}

/// Maps for e restricted to images y with J(set(x), set(y)) > 0; the pruned
/// maps all have weight 0 and can never be drawn.
std::vector<ParticipantMap> positive_maps(const Step& e, const Schema& host,
                                          const ParticipantSets& xs, const ParticipantSets& ys,
                                          std::size_t cap, Rng& rng) {
  const auto from = step_participants(e);
  std::vector<std::vector<std::string>> options;
  for (const auto& x : from) {
    std::vector<std::string> ok;
    for (const auto& p : host.participants)
      if (jaccard(lookup(xs, x), lookup(ys, p.id)) > 0.0) ok.push_back(p.id);
    options.push_back(std::move(ok));
  }
  return enumerate_product(from, options, cap, rng);
}

}  // namespace

std::vector<IntrusionCandidate> library_candidates(const Schema& host,
                                                   std::span<const Schema> library, Rng& rng,
                                                   std::size_t map_cap) {
  std::vector<IntrusionCandidate> out;
  const auto ys = coarse_types_of(host);
  for (const auto& t : library) {
    if (t.id == host.id) continue;
    const auto xs = coarse_types_of(t);
    for (const auto& e : t.steps)
      for (auto& m : positive_maps(e, host, xs, ys, map_cap, rng)) {
        const double w = library_weight(m, xs, ys);
        out.push_back({host.id, t.id, e, std::move(m), w, std::nullopt});
      }
  }
  return out;
}

namespace {

ParticipantSets entities_of(const MatchResult& m) {
  ParticipantSets out;
  for (const auto& [pid, ent] : m.bindings) {
    auto& s = out[pid];
    if (ent != kUnkEntity) s.insert(ent);
  }
  return out;
}

}  // namespace

std::vector<IntrusionCandidate> corpus_candidates(const Schema& host,
                                                  std::span<const Schema> library,
                                                  std::span<const MatchedDocument> corpus,
                                                  Rng& rng, std::size_t map_cap) {
  std::vector<IntrusionCandidate> out;
  for (const auto& d : corpus) {
    if (d.n_events < 2 || d.n_events > 10) continue;
    const MatchResult* hm = nullptr;
    for (const auto& m : d.matches)
      if (m.schema_id == host.id && m.theta > 0.0) hm = &m;
    if (!hm) continue;
    const auto ys = entities_of(*hm);
    for (const auto& m : d.matches) {
      if (m.schema_id == host.id || m.theta <= 0.0) continue;
      const Schema* t = find_schema(library, m.schema_id);
      if (!t) continue;
      const auto xs = entities_of(m);
      for (const auto& e : t->steps)
        for (auto& map : positive_maps(e, host, xs, ys, map_cap, rng)) {
          const double w = corpus_weight(map, xs, ys);
          out.push_back({host.id, t->id, e, std::move(map), w, d.doc_id});
        }
    }
  }
  return out;
}

std::optional<IntrusionCandidate> draw_candidate(const Schema& host,
                                                 std::span<const Schema> library,
                                                 std::vector<IntrusionCandidate> candidates,
                                                 Rng& rng) {
  std::vector<double> w;
  w.reserve(candidates.size());
  for (const auto& c : candidates) w.push_back(std::max(0.0, c.weight));
  while (std::any_of(w.begin(), w.end(), [](double x) { return x > 0.0; })) {
    const std::size_t i = rng.weighted_index(w);
    const IntrusionCandidate& c = candidates[i];
    const Schema* source = find_schema(library, c.source_schema);
    if (!source) throw PreconditionError("unknown source schema '" + c.source_schema + "'");
    if (duplicates_existing_step(host, remap_step(c.step, c.map)) ||
        !rename_step(c.step, c.map, *source, host).residual.empty()) {
      w[i] = 0.0;
      continue;
    }
    return c;
  }
  return std::nullopt;
}

IntrusionTask build_task(const Schema& host, std::span<const Schema> library,
                         const IntrusionCandidate& chosen, IntrusionMethod method,
                         const std::string& task_id, std::uint64_t shuffle_seed) {
  const Schema* source = find_schema(library, chosen.source_schema);
  if (!source) throw PreconditionError("unknown source schema '" + chosen.source_schema + "'");
  const RenameResult renamed = rename_step(chosen.step, chosen.map, *source, host);

  std::vector<std::string> texts;
  for (const auto& s : host.steps) texts.push_back(step_text(s));
  texts.push_back(renamed.text);
  std::vector<std::size_t> order(texts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(shuffle_seed);
  rng.shuffle(std::span<std::size_t>(order));

  IntrusionTask t;
  t.task_id = task_id;
  t.host_schema = host.id;
  t.method = method;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    t.steps_shown.push_back(texts[order[pos]]);
    if (order[pos] == host.steps.size()) t.answer_index = pos;
  }
  t.provenance = chosen;
  t.original_description = step_text(chosen.step);
  t.residual_names = renamed.residual;
  t.shuffle_seed = shuffle_seed;
  return t;
}

GenerationResult generate_tasks(std::span<const Schema> library,
                                std::span<const MatchedDocument> corpus,
                                const GenerationOptions& options) {
  if (library.size() < 2) throw PreconditionError("intrusion needs at least 2 schemas");
  const std::string method = to_string(options.method);
  std::vector<GenerationResult> per_host(library.size());
  const auto n = static_cast<std::ptrdiff_t>(library.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t h = 0; h < n; ++h) {
    const Schema& host = library[h];
    for (std::size_t k = 0; k < options.tasks_per_schema; ++k) {
      const std::string key = host.id + "/" + method + "/" + std::to_string(k);
      const std::uint64_t seed = derive_seed(options.seed, key);
      Rng rng(seed);
      auto cands = options.method == IntrusionMethod::Library
                       ? library_candidates(host, library, rng, options.map_cap)
                       : corpus_candidates(host, library, corpus, rng, options.map_cap);
      auto chosen = draw_candidate(host, library, std::move(cands), rng);
      if (!chosen) {
        per_host[h].skipped.push_back({host.id, "no candidate with positive weight"});
        continue;
      }
      per_host[h].tasks.push_back(build_task(host, library, *chosen, options.method,
                                             host.id + "-" + method + "-" + std::to_string(k),
                                             derive_seed(seed, "shuffle")));
    }
  }
  GenerationResult out;
  for (auto& r : per_host) {
    for (auto& t : r.tasks) out.tasks.push_back(std::move(t));
    for (auto& s : r.skipped) out.skipped.push_back(std::move(s));
  }
  return out;
}

void write_tasks(std::ostream& out, std::span<const IntrusionTask> tasks) {
  for (const auto& t : tasks) out << json{{"task_id", t.task_id}, {"steps", t.steps_shown}}.dump() << "\n";
}

void write_answer_key(std::ostream& out, std::span<const IntrusionTask> tasks) {
  for (const auto& t : tasks) {
    json j{{"task_id", t.task_id},
           {"answer_index", t.answer_index},
           {"n_shown", t.steps_shown.size()},
           {"host_schema", t.host_schema},
           {"source_schema", t.provenance.source_schema},
           {"source_step", t.provenance.step.id},
           {"map", t.provenance.map},
           {"weight", t.provenance.weight},
           {"method", to_string(t.method)},
           {"shuffle_seed", t.shuffle_seed}};
    if (t.provenance.doc_id) j["doc_id"] = *t.provenance.doc_id;
    out << j.dump() << "\n";
  }
}

void write_review(std::ostream& out, std::span<const IntrusionTask> tasks) {
  out << "task_id\thost\tsource\toriginal\tintruder\tresidual_names\n";
  for (const auto& t : tasks) {
    std::string residual;
    for (const auto& r : t.residual_names) residual += (residual.empty() ? "" : ",") + r;
    out << t.task_id << "\t" << t.host_schema << "\t" << t.provenance.source_schema << "\t"
        << t.original_description << "\t" << t.steps_shown[t.answer_index] << "\t" << residual
        << "\n";
  }
}

AnswerKey read_answer_key(std::istream& in) {
  AnswerKey key;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where, e.what());
    }
    AnswerKeyEntry e;
    e.answer_index = static_cast<std::size_t>(require_number(j, "answer_index", where));
    e.n_shown = static_cast<std::size_t>(require_number(j, "n_shown", where));
    if (e.answer_index >= e.n_shown) throw ParseError(where, "answer_index out of range");
    if (!key.emplace(require_string(j, "task_id", where), e).second)
      throw ParseError(where, "duplicate task id");
  }
  return key;
}

ResponseSet read_responses(std::istream& in) {
  ResponseSet out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = "line " + std::to_string(lineno);
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, '\t');) f.push_back(cell);
    if (f.size() != 3 || f[0].empty()) throw ParseError(where, "expected task_id<TAB>annotator<TAB>pick");
    std::size_t pos = 0;
    unsigned long pick = 0;
    try {
      pick = std::stoul(f[2], &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != f[2].size()) throw ParseError(where, "bad pick '" + f[2] + "'");
    out[f[0]].push_back(pick);
  }
  std::vector<std::string> bad;
  for (const auto& [task, picks] : out)
    if (picks.size() != 3)
      bad.push_back(task + ": " + std::to_string(picks.size()) + " responses, expected 3");
  if (!bad.empty()) throw ValidationError(bad);
  return out;
}

Baselines baselines_for_probabilities(std::span<const double> ps) {
  Baselines b;
  if (ps.empty()) return b;
  for (double p : ps) {
    const double q = 1.0 - p;
    b.random += p;
    b.random_1 += 1.0 - q * q * q;
    b.random_2 += 3.0 * p * p * q + p * p * p;
    b.random_3 += p * p * p;
  }
  const double n = static_cast<double>(ps.size());
  b.random /= n;
  b.random_1 /= n;
  b.random_2 /= n;
  b.random_3 /= n;
  return b;
}

Baselines random_baselines(std::span<const std::size_t> host_step_counts) {
  std::vector<double> ps;
  ps.reserve(host_step_counts.size());
  for (std::size_t k : host_step_counts) ps.push_back(1.0 / static_cast<double>(k + 1));
  return baselines_for_probabilities(ps);
}

AccuracyReport score_responses(const AnswerKey& key, const ResponseSet& responses) {
  std::vector<std::string> bad;
  for (const auto& [task, _] : responses)
    if (!key.contains(task)) bad.push_back(task + ": not in answer key");
  for (const auto& [task, _] : key)
    if (!responses.contains(task)) bad.push_back(task + ": no responses");
  for (const auto& [task, picks] : responses) {
    if (picks.size() != 3) bad.push_back(task + ": expected exactly 3 responses");
    auto it = key.find(task);
    if (it == key.end()) continue;
    for (std::size_t p : picks)
      if (p >= it->second.n_shown) bad.push_back(task + ": pick " + std::to_string(p) + " out of range");
  }
  if (!bad.empty()) throw ValidationError(bad);

  AccuracyReport r;
  r.tasks = key.size();
  if (r.tasks == 0) return r;
  std::size_t correct = 0, picks_total = 0, one = 0, two = 0, all = 0;
  std::vector<std::size_t> host_steps;
  for (const auto& [task, entry] : key) {
    std::size_t c = 0;
    for (std::size_t p : responses.at(task)) c += p == entry.answer_index;
    correct += c;
    picks_total += 3;
    one += c >= 1;
    two += c >= 2;
    all += c == 3;
    host_steps.push_back(entry.n_shown - 1);
  }
  const double n = static_cast<double>(r.tasks);
  r.total = static_cast<double>(correct) / static_cast<double>(picks_total);
  r.one_ann = static_cast<double>(one) / n;
  r.two_ann = static_cast<double>(two) / n;
  r.all_ann = static_cast<double>(all) / n;
  r.baselines = random_baselines(host_steps);
  return r;
}

std::string format_accuracy(const AccuracyReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "tasks   Total  1Ann   2Ann   AllAnn Random Rand1  Rand2  Rand3\n"
                "%-7zu %-6.1f %-6.1f %-6.1f %-6.1f %-6.1f %-6.1f %-6.1f %-6.1f\n",
                r.tasks, 100 * r.total, 100 * r.one_ann, 100 * r.two_ann, 100 * r.all_ann,
                100 * r.baselines.random, 100 * r.baselines.random_1, 100 * r.baselines.random_2,
                100 * r.baselines.random_3);
  return buf;
}

json accuracy_to_json(const AccuracyReport& r) {
  return {{"tasks", r.tasks},
          {"total", r.total},
          {"one_ann", r.one_ann},
          {"two_ann", r.two_ann},
          {"all_ann", r.all_ann},
          {"random", r.baselines.random},
          {"random_1", r.baselines.random_1},
          {"random_2", r.baselines.random_2},
          {"random_3", r.baselines.random_3}};
}

}  // namespace evschema
