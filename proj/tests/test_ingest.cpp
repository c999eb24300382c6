#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "evschema/error.hpp"
#include "evschema/ingest.hpp"
#include "support.hpp"

using namespace evschema;

namespace {

DocumentGraph excerpt() {
  return parse_document_graph(read_file(testing::fixture("documents/extractor_excerpt.json")));
}

ExtractedEvent event(const std::string& id, const std::string& type,
                     std::vector<std::pair<std::string, std::string>> fills) {
  ExtractedEvent e{id, type, 1.0, {}};
  for (auto& [role, ent] : fills) e.participants.push_back({id + role, role, {{ent, 1.0}}});
  return e;
}

}  // namespace

TEST_CASE("the extractor excerpt parses despite trailing commas") {
  const DocumentGraph d = excerpt();
  REQUIRE(d.events.size() == 1);
  const ExtractedEvent& e = d.events[0];
  CHECK(e.id == "K0C03N60D.7.2");
  CHECK(e.event_type == "Movement.Transportation.Unspecified");
  CHECK(e.confidence == 0.9);
  REQUIRE(e.participants.size() == 2);
  CHECK(e.participants[0].role == "Destination");
  CHECK(e.participants[1].role == "PassengerArtifact");
  CHECK(e.participants[1].values[0].confidence == 0.8);
  CHECK(d.entities == std::set<std::string>{"e2323a1", "e2323a3"});
}

TEST_CASE("document parsing edge cases") {
  CHECK(parse_document_graph(R"({"@id": "d", "events": []})").events.empty());
  CHECK(parse_document_graph("[]", "fallback").doc_id == "fallback");
  CHECK_THROWS_AS(parse_document_graph(R"({"@id": "d", "events": [{"@id": "e", "@type": "X", "confidence": 1.7}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_document_graph(R"([{"@id": "e", "@type": "X"}, {"@id": "e", "@type": "Y"}])"),
                  ParseError);
  CHECK_THROWS_AS(parse_document_graph("[1, 2"), ParseError);
}

TEST_CASE("type and role normalization") {
  CHECK(normalize_event_type("kairos:Primitives/Events/Life.Die.Unspecified") == "Life.Die.Unspecified");
  CHECK(normalize_event_type("Life.Die.Unspecified") == "Life.Die.Unspecified");
  CHECK(normalize_role("kairos:Primitives/Events/Life.Die.Unspecified/Slots/Victim") == "Victim");
  CHECK(normalize_role("Victim") == "Victim");
}

TEST_CASE("document JSON round trip") {
  const DocumentGraph d = excerpt();
  CHECK(document_from_json(document_to_json(d)) == d);
}

TEST_CASE("apply_mapping drops unmapped types and counts them") {
  const Ontology& o = testing::ontology();
  const EventTypeMapping m = load_mapping_file(testing::fixture("small_corpus/mapping.json"), o);
  DocumentGraph d{"d", {event("1", "fn:Attack", {{"Assailant", "a"}}), event("2", "fn:Weather", {}),
                        event("3", "fn:Killing", {{"Victim", "b"}})}, {}};
  const MappedDocument out = apply_mapping(d, m);
  CHECK(out.doc.events.size() == 2);
  CHECK(out.dropped == 1);
  CHECK(out.doc.events[0].participants[0].role == "Attacker");

  SUBCASE("identity mapping leaves target-ontology documents alone") {
    const MappedDocument again = apply_mapping(out.doc, identity_mapping(o));
    CHECK(again.doc == out.doc);
    CHECK(again.dropped == 0);
  }
  SUBCASE("idempotent once everything is in the target ontology") {
    const MappedDocument twice = apply_mapping(out.doc, m);
    CHECK(twice.doc == out.doc);
  }
}

TEST_CASE("mapping files are checked against the ontology") {
  const Ontology& o = testing::ontology();
  CHECK_THROWS_AS(load_mapping(R"({"rules": [{"source": "a", "target": "Nope"}]})", o), ValidationError);
  CHECK_THROWS_AS(load_mapping(R"({"rules": [{"source": "a", "target": "Life.Die.Unspecified",
                                              "roles": {"x": "Pilot"}}]})", o),
                  ValidationError);
  CHECK_THROWS_AS(load_mapping(R"({"rules": {}})", o), ParseError);
}

TEST_CASE("small fixture corpus: per-type counts equal the hand tally") {
  const Ontology& o = testing::ontology();
  const auto raw = load_corpus(testing::fixture("small_corpus/docs"));
  REQUIRE(raw.size() == 10);
  const EventTypeMapping m = load_mapping_file(testing::fixture("small_corpus/mapping.json"), o);
  const CorpusStructures c = prepare_corpus(raw, m);
  std::map<std::string, std::size_t> totals;
  for (const auto& ms : c.multisets)
    for (const auto& [t, n] : ms.counts) totals[t] += n;
  // d01..d10 counted by hand from the fixture files.
  CHECK(totals == std::map<std::string, std::size_t>{{"Conflict.Attack.Unspecified", 5},
                                                     {"Justice.ArrestJailDetain.Unspecified", 5},
                                                     {"Justice.TrialHearing.Unspecified", 3},
                                                     {"Life.Die.Unspecified", 4},
                                                     {"Medical.Intervention.Unspecified", 1},
                                                     {"Movement.Transportation.Unspecified", 3}});
  CHECK(c.dropped_events == 1);
  CHECK(c.transactions.size() == 15);
  CHECK(c.multisets[8].total() == 0);  // d09 is empty
}

TEST_CASE("event_multiset") {
  DocumentGraph d{"d", {event("1", "Life.Infect.Unspecified", {}), event("2", "Life.Infect.Unspecified", {}),
                        event("3", "Medical.Vaccinate.Unspecified", {})}, {}};
  const EventMultiset m = event_multiset(d);
  CHECK(m.counts == std::map<std::string, std::size_t>{{"Life.Infect.Unspecified", 2},
                                                       {"Medical.Vaccinate.Unspecified", 1}});
  CHECK(m.total() == 3);
  CHECK(event_multiset(DocumentGraph{}).counts.empty());

  std::mt19937_64 gen(5);
  for (int i = 0; i < 20; ++i) {
    DocumentGraph p = d;
    std::shuffle(p.events.begin(), p.events.end(), gen);
    CHECK(event_multiset(p) == m);
  }
}

TEST_CASE("build_transactions") {
  SUBCASE("one entity across two events") {
    DocumentGraph d{"d", {event("1", "A", {{"r", "x"}}), event("2", "B", {{"r", "x"}})}, {}};
    const auto t = build_transactions(d);
    REQUIRE(t.size() == 1);
    CHECK(t[0].items == std::vector<std::string>{"A", "B"});
  }
  SUBCASE("two entities in disjoint events") {
    DocumentGraph d{"d", {event("1", "A", {{"r", "x"}}), event("2", "B", {{"r", "y"}})}, {}};
    CHECK(build_transactions(d).size() == 2);
  }
  SUBCASE("extractor excerpt: one transaction per argument") {
    const auto t = build_transactions(excerpt());
    REQUIRE(t.size() == 2);
    for (const auto& tx : t) CHECK(tx.items == std::vector<std::string>{"Movement.Transportation.Unspecified"});
    CHECK(t[0].chain_id == "e2323a1");
    CHECK(t[1].chain_id == "e2323a3");
  }
}

TEST_CASE("property: every event with an argument lands in some transaction") {
  const Ontology& o = testing::ontology();
  const auto raw = load_corpus(testing::fixture("synthetic/corpus.jsonl"));
  const CorpusStructures c = prepare_corpus(raw, identity_mapping(o));
  std::map<std::string, std::set<std::string>> by_doc;
  for (const auto& t : c.transactions) by_doc[t.doc_id].insert(t.items.begin(), t.items.end());
  for (const auto& d : c.documents)
    for (const auto& ev : d.events)
      if (!ev.participants.empty()) CHECK(by_doc[d.doc_id].contains(ev.event_type));
}

TEST_CASE("transaction lines round trip") {
  const Transaction t{"doc1", "e7", {"A.B.C", "D.E.F"}};
  CHECK(parse_transaction_line(format_transaction(t)) == t);
  std::stringstream ss;
  write_transactions(ss, {t, {"doc2", "e1", {"X"}}});
  const auto back = read_transactions(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == t);
  CHECK_THROWS_AS(parse_transaction_line("only-one-field", 3), ParseError);
  CHECK_THROWS_AS(parse_transaction_line("d\tc\t", 4), ParseError);
}

TEST_CASE("parallel corpus preparation keeps corpus order") {
  const auto raw = load_corpus(testing::fixture("synthetic/corpus.jsonl"));
  const CorpusStructures c = prepare_corpus(raw, identity_mapping(testing::ontology()));
  REQUIRE(c.documents.size() == raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) CHECK(c.documents[i].doc_id == raw[i].doc_id);
}
