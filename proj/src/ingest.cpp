#include "evschema/ingest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "evschema/error.hpp"

namespace evschema {

std::size_t EventMultiset::total() const {
  std::size_t n = 0;
  for (const auto& [_, c] : counts) n += c;
  return n;
}

std::string normalize_event_type(std::string_view qualified) {
  constexpr std::string_view marker = "/Events/";
  if (auto pos = qualified.rfind(marker); pos != std::string_view::npos)
    return std::string(qualified.substr(pos + marker.size()));
  return std::string(qualified);
}

std::string normalize_role(std::string_view qualified) {
  constexpr std::string_view marker = "/Slots/";
  if (auto pos = qualified.rfind(marker); pos != std::string_view::npos)
    return std::string(qualified.substr(pos + marker.size()));
  if (auto pos = qualified.rfind('/'); pos != std::string_view::npos)
    return std::string(qualified.substr(pos + 1));
  return std::string(qualified);
}

namespace {

double confidence_field(const json& obj, const std::string& where) {
  auto it = obj.find("confidence");
  if (it == obj.end() || it->is_null()) return 1.0;
  if (!it->is_number()) throw ParseError(where + "/confidence", "expected a number");
  const double c = it->get<double>();
  if (!(c >= 0.0 && c <= 1.0))
    throw ParseError(where + "/confidence", "confidence " + it->dump() + " outside [0,1]");
  return c;
}

ExtractedEvent parse_event(const json& j, const std::string& where) {
  ExtractedEvent ev;
  ev.id = require_string(j, "@id", where);
  ev.event_type = normalize_event_type(require_string(j, "@type", where));
  ev.confidence = confidence_field(j, where);
  if (auto it = j.find("participants"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError(where + "/participants", "expected an array");
    for (std::size_t p = 0; p < it->size(); ++p) {
      const std::string pw = where + "/participants/" + std::to_string(p);
      const json& pj = (*it)[p];
      ExtractedParticipant part;
      part.id = optional_string(pj, "@id", pw);
      part.role = normalize_role(require_string(pj, "role", pw));
      const json& vals = require_field(pj, "values", pw);
      if (!vals.is_array()) throw ParseError(pw + "/values", "expected an array");
      for (std::size_t v = 0; v < vals.size(); ++v) {
        const std::string vw = pw + "/values/" + std::to_string(v);
        EntityValue val{require_string(vals[v], "entity", vw), confidence_field(vals[v], vw)};
        if (val.entity.empty()) throw ParseError(vw + "/entity", "empty entity id");
        part.values.push_back(std::move(val));
      }
      ev.participants.push_back(std::move(part));
    }
  }
  return ev;
}

std::string id_prefix(const std::string& event_id) {
  auto dot = event_id.find('.');
  return dot == std::string::npos ? event_id : event_id.substr(0, dot);
}

}  // namespace

DocumentGraph document_from_json(const json& j, const std::string& fallback_id) {
  DocumentGraph doc;
  const json* events = nullptr;
  json single = json::array();
  if (j.is_array()) {
    events = &j;
  } else if (j.is_object() && j.contains("events")) {
    events = &j["events"];
    if (!events->is_array()) throw ParseError("/events", "expected an array");
    doc.doc_id = optional_string(j, "doc_id", "", optional_string(j, "@id", ""));
    if (auto it = j.find("entities"); it != j.end() && it->is_array())
      for (const auto& e : *it)
        if (e.is_string()) doc.entities.insert(e.get<std::string>());
  } else if (j.is_object() && j.contains("@type")) {
    single.push_back(j);
    events = &single;
  } else {
    throw ParseError("", "expected a document, an event array, or a single event");
  }

  std::set<std::string> seen;
  for (std::size_t i = 0; i < events->size(); ++i) {
    const std::string where = (events == &single ? std::string() : "/events/" + std::to_string(i));
    ExtractedEvent ev = parse_event((*events)[i], where);
    if (!seen.insert(ev.id).second) throw ParseError(where, "duplicate event id '" + ev.id + "'");
    for (const auto& p : ev.participants)
      for (const auto& v : p.values) doc.entities.insert(v.entity);
    doc.events.push_back(std::move(ev));
  }
  if (doc.doc_id.empty()) doc.doc_id = fallback_id;
  if (doc.doc_id.empty() && !doc.events.empty()) doc.doc_id = id_prefix(doc.events.front().id);
  return doc;
}

DocumentGraph parse_document_graph(std::string_view source, const std::string& fallback_id) {
  return document_from_json(parse_json_lenient(source), fallback_id);
}

json document_to_json(const DocumentGraph& doc) {
  json events = json::array();
  for (const auto& ev : doc.events) {
    json parts = json::array();
    for (const auto& p : ev.participants) {
      json vals = json::array();
      for (const auto& v : p.values) vals.push_back({{"entity", v.entity}, {"confidence", v.confidence}});
      parts.push_back({{"@id", p.id}, {"role", p.role}, {"values", std::move(vals)}});
    }
    events.push_back({{"@id", ev.id},
                      {"@type", ev.event_type},
                      {"confidence", ev.confidence},
                      {"participants", std::move(parts)}});
  }
  return {{"@id", doc.doc_id}, {"entities", doc.entities}, {"events", std::move(events)}};
}

std::vector<DocumentGraph> load_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".json" || ext == ".jsonl")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(path)) {
    files.push_back(path);
  } else {
    throw Error("corpus not found: " + path.string());
  }

  std::vector<DocumentGraph> docs;
  for (const auto& f : files) {
    const std::string text = read_file(f);
    if (f.extension() == ".jsonl") {
      std::istringstream lines(text);
      std::string line;
      std::size_t n = 0;
      while (std::getline(lines, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string origin = f.string() + ":" + std::to_string(n);
        try {
          docs.push_back(parse_document_graph(line, f.stem().string() + "-" + std::to_string(n)));
        } catch (const ParseError& e) {
          throw ParseError(origin, e.what());
        }
      }
    } else {
      try {
        docs.push_back(parse_document_graph(text, f.stem().string()));
      } catch (const ParseError& e) {
        throw ParseError(f.string(), e.what());
      }
    }
  }
  return docs;
}

EventTypeMapping load_mapping(std::string_view text, const Ontology& ontology) {
  const json doc = parse_json_lenient(text);
  const json& rules = doc.is_array() ? doc : require_field(doc, "rules", "");
  if (!rules.is_array()) throw ParseError("/rules", "expected an array");

  EventTypeMapping m = identity_mapping(ontology);
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const std::string where = "/rules/" + std::to_string(i);
    const std::string source = normalize_event_type(require_string(rules[i], "source", where));
    MappingRule rule{normalize_event_type(require_string(rules[i], "target", where)), {}};
    if (auto it = rules[i].find("roles"); it != rules[i].end() && !it->is_null()) {
      if (!it->is_object()) throw ParseError(where + "/roles", "expected an object");
      for (auto r = it->begin(); r != it->end(); ++r) {
        if (!r.value().is_string()) throw ParseError(where + "/roles/" + r.key(), "expected a string");
        rule.role_renames[r.key()] = r.value().get<std::string>();
      }
    }
    const EventTypeDef* target = ontology.find_event(rule.target);
    if (target == nullptr) {
      problems.push_back(where + ": unknown target event type '" + rule.target + "'");
    } else {
      for (const auto& [from, to] : rule.role_renames)
        if (target->find_role(to) == nullptr)
          problems.push_back(where + ": role '" + to + "' does not exist on " + rule.target);
    }
    if (m.rules.contains(source))
      problems.push_back(where + ": source type '" + source + "' mapped twice");
    m.rules[source] = std::move(rule);
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return m;
}

EventTypeMapping load_mapping_file(const std::filesystem::path& path, const Ontology& ontology) {
  return load_mapping(read_file(path), ontology);
}

EventTypeMapping identity_mapping(const Ontology& ontology) {
  EventTypeMapping m;
  for (const auto& ev : ontology.event_types()) m.target_types.insert(ev.id);
  return m;
}

MappedDocument apply_mapping(const DocumentGraph& doc, const EventTypeMapping& mapping) {
  MappedDocument out;
  out.doc.doc_id = doc.doc_id;
  out.doc.entities = doc.entities;
  for (const auto& ev : doc.events) {
    auto rule = mapping.rules.find(ev.event_type);
    if (rule == mapping.rules.end()) {
      if (mapping.target_types.contains(ev.event_type)) {
        out.doc.events.push_back(ev);
      } else {
        ++out.dropped;
      }
      continue;
    }
    ExtractedEvent mapped = ev;
    mapped.event_type = rule->second.target;
    for (auto& p : mapped.participants)
      if (auto rn = rule->second.role_renames.find(p.role); rn != rule->second.role_renames.end())
        p.role = rn->second;
    out.doc.events.push_back(std::move(mapped));
  }
  for (const auto& ev : out.doc.events)
    for (const auto& p : ev.participants)
      for (const auto& v : p.values) out.doc.entities.insert(v.entity);
  return out;
}

EventMultiset event_multiset(const DocumentGraph& doc) {
  EventMultiset m;
  m.doc_id = doc.doc_id;
  for (const auto& ev : doc.events) ++m.counts[ev.event_type];
  return m;
}

std::vector<Transaction> build_transactions(const DocumentGraph& doc) {
  std::map<std::string, std::set<std::string>> by_entity;
  for (const auto& ev : doc.events)
    for (const auto& p : ev.participants)
      for (const auto& v : p.values) by_entity[v.entity].insert(ev.event_type);
  std::vector<Transaction> out;
  out.reserve(by_entity.size());
  for (auto& [entity, types] : by_entity)
    out.push_back({doc.doc_id, entity, {types.begin(), types.end()}});
  return out;
}

std::string format_transaction(const Transaction& t) {
  std::string line = t.doc_id + "\t" + t.chain_id + "\t";
  for (std::size_t i = 0; i < t.items.size(); ++i) line += (i ? " " : "") + t.items[i];
  return line;
}

Transaction parse_transaction_line(std::string_view line, std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no);
  auto tab1 = line.find('\t');
  auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
  if (tab2 == std::string_view::npos)
    throw ParseError(where, "expected doc_id<TAB>chain_id<TAB>items");
  Transaction t{std::string(line.substr(0, tab1)), std::string(line.substr(tab1 + 1, tab2 - tab1 - 1)),
                {}};
  std::istringstream items{std::string(line.substr(tab2 + 1))};
  std::set<std::string> uniq;
  for (std::string item; items >> item;) uniq.insert(item);
  if (uniq.empty()) throw ParseError(where, "transaction has no items");
  t.items.assign(uniq.begin(), uniq.end());
  return t;
}

void write_transactions(std::ostream& out, const std::vector<Transaction>& transactions) {
  for (const auto& t : transactions) out << format_transaction(t) << '\n';
}

std::vector<Transaction> read_transactions(std::istream& in) {
  std::vector<Transaction> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(parse_transaction_line(line, n));
  }
  return out;
}

CorpusStructures prepare_corpus(const std::vector<DocumentGraph>& raw,
                                const EventTypeMapping& mapping) {
  const auto n = static_cast<std::ptrdiff_t>(raw.size());
  std::vector<MappedDocument> mapped(raw.size());
  std::vector<std::vector<Transaction>> tx(raw.size());
  CorpusStructures out;
  out.multisets.resize(raw.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    mapped[i] = apply_mapping(raw[i], mapping);
    out.multisets[i] = event_multiset(mapped[i].doc);
    tx[i] = build_transactions(mapped[i].doc);
  }
  out.documents.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.dropped_events += mapped[i].dropped;
    out.documents.push_back(std::move(mapped[i].doc));
    for (auto& t : tx[i]) out.transactions.push_back(std::move(t));
  }
  return out;
}

}  // namespace evschema
