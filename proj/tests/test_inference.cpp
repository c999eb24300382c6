#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "evschema/error.hpp"
#include "evschema/inference.hpp"
#include "evschema/store.hpp"
#include "support.hpp"

using namespace evschema;

namespace {

DocumentGraph remote_doc() {
  return parse_document_graph(read_file(testing::fixture("documents/remote_teaching_doc.json")));
}

Schema remote_schema() { return testing::fixture_schema("schemas/Remote_Teaching.json"); }

std::string rule_text(const GroundRule& r) {
  std::string s;
  for (const auto& a : r.body) s += (s.empty() ? "" : " & ") + a.to_string();
  s += " -> " + (r.head ? r.head->to_string() : std::string("false"));
  char w[16];
  std::snprintf(w, sizeof w, " @%g", r.weight);
  return s + w;
}

ExtractedEvent ev(const std::string& id, const std::string& type, double conf,
                  std::vector<std::pair<std::string, std::string>> fills) {
  ExtractedEvent e{id, type, conf, {}};
  for (auto& [role, ent] : fills) e.participants.push_back({id + "." + role, role, {{ent, 1.0}}});
  return e;
}

}  // namespace

TEST_CASE("flattening the extractor excerpt") {
  const auto flat =
      flatten_document(parse_document_graph(read_file(testing::fixture("documents/extractor_excerpt.json"))));
  const std::string t = "Movement.Transportation.Unspecified";
  REQUIRE(flat.size() == 3);
  CHECK(flat.at(Atom{t, {"K0C03N60D.7.2"}}) == 0.9);
  CHECK(flat.at(Atom{t + "/Slots/Destination", {"K0C03N60D.7.2", "e2323a3"}}) == 1.0);
  CHECK(flat.at(Atom{t + "/Slots/PassengerArtifact", {"K0C03N60D.7.2", "e2323a1"}}) == 0.8);
  CHECK(flatten_document(DocumentGraph{}).empty());

  const auto two = flatten_document(remote_doc());
  // 2 unary atoms plus one binary atom per participant value (5 + 5).
  CHECK(two.size() == 2 + 10);
}

TEST_CASE("one-step schema grounding structure") {
  Schema s;
  s.id = "one";
  s.name = "one";
  s.participants = {{"v", "Victim", {"per"}, {}}};
  s.steps = {{"die", "Life.Die.Unspecified", {{"Victim", {"v"}}}, "v dies"}};
  DocumentGraph d{"d", {ev("e1", "Life.Die.Unspecified", 1.0, {{"Victim", "x"}})}, {"x"}};
  const Grounding g = ground_schema(s, d, {});
  CHECK(g.program.targets.size() >= 2);
  std::set<double> weights;
  for (const auto& r : g.program.rules) weights.insert(r.weight);
  CHECK(weights == std::set<double>{1.0, 10.0, 100.0});
  CHECK(g.bindings.front().step_events == std::vector<std::string>{"e1"});
  CHECK(g.bindings.front().participants.at("v") == "x");
  CHECK_NOTHROW(g.program.check());
}

TEST_CASE("remote teaching grounding reproduces the documented rules") {
  const Grounding g = ground_schema(remote_schema(), remote_doc(), {});
  const std::string tt = "Cognitive.TeachingTrainingLearning.Unspecified", cc = "Contact.Contact.Unspecified";
  const std::vector<std::string> expected = {
      tt + "(lec1) & " + tt + "/Slots/Agent(lec1, prof) & " + tt + "/Slots/Institution(lec1, univ) & " + tt +
          "/Slots/Patient(lec1, students) & " + tt + "/Slots/Subject(lec1, topic) & " + tt +
          "/Slots/Tool(lec1, zoom) -> step:Remote_Teaching/Lecture(lec1, prof, univ, students, topic, zoom) @100",
      cc + "(sem1) & " + cc + "/Slots/Agent(sem1, prof) & " + cc + "/Slots/Agent(sem1, ta) & " + cc +
          "/Slots/Agent(sem1, students) & " + cc + "/Slots/Subject(sem1, topic) & " + cc +
          "/Slots/Tool(sem1, zoom) -> step:Remote_Teaching/Seminar(sem1, prof, ta, students, topic, zoom) @100",
      "step:Remote_Teaching/Lecture(lec1, prof, univ, students, topic, zoom) & "
      "step:Remote_Teaching/Seminar(sem1, prof, ta, students, topic, zoom) -> schema:Remote_Teaching(lec1, sem1) @10",
      "step:Remote_Teaching/Lecture(lec1, prof, univ, students, topic, zoom) -> false @1",
      "step:Remote_Teaching/Seminar(sem1, prof, ta, students, topic, zoom) -> false @1",
      "schema:Remote_Teaching(lec1, sem1) -> false @1",
  };
  std::vector<std::string> got;
  for (const auto& r : g.program.rules) {
    const std::string t = rule_text(r);
    if (t.find("UNK") == std::string::npos) got.push_back(t);
  }
  std::sort(got.begin(), got.end());
  std::vector<std::string> want = expected;
  std::sort(want.begin(), want.end());
  CHECK(got == want);
  // Best binding first: both steps on real events, everyone bound.
  CHECK(g.bindings.front().step_events == std::vector<std::string>{"lec1", "sem1"});
  CHECK(g.bindings.front().participants.at("TA") == "ta");
  CHECK_FALSE(g.program.truncated);
}

TEST_CASE("no compatible events: only the all-UNK binding") {
  DocumentGraph d{"d", {ev("e", "Life.Die.Unspecified", 1.0, {{"Victim", "x"}})}, {"x"}};
  const Grounding g = ground_schema(remote_schema(), d, {});
  REQUIRE(g.bindings.size() == 1);
  CHECK(g.bindings[0].step_events == std::vector<std::string>{kUnkEvent, kUnkEvent});
  for (const auto& [p, e] : g.bindings[0].participants) CHECK(e == kUnkEntity);
  const MatchResult m = match_schema(remote_schema(), d);
  CHECK(m.theta == 0.0);
  CHECK(m.matched_steps == 0);
  CHECK(m.predicted_events.size() == 2);
}

TEST_CASE("full and partial matches of the remote teaching schema") {
  const MatchResult full = match_schema(remote_schema(), remote_doc());
  CHECK(full.theta_raw >= 0.99);
  CHECK(full.theta == full.theta_raw);
  CHECK(full.matched_steps == 2);
  CHECK(full.predicted_events.empty());
  CHECK(full.bindings.at("Professor") == "prof");
  CHECK(full.solver_converged);

  DocumentGraph lecture_only = remote_doc();
  lecture_only.events.pop_back();
  const MatchResult half = match_schema(remote_schema(), lecture_only);
  CHECK(half.matched_steps == 1);
  CHECK(half.theta_raw >= 0.99);
  CHECK(half.theta == doctest::Approx(half.theta_raw / 2));
  REQUIRE(half.predicted_events.size() == 1);
  CHECK(half.predicted_events[0].first == "Contact.Contact.Unspecified");
  CHECK(half.bindings.at("TA") == kUnkEntity);
}

TEST_CASE("property: higher event confidence never lowers theta") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    DocumentGraph d = remote_doc();
    for (auto& e : d.events) e.confidence = u(gen);
    const double before = match_schema(remote_schema(), d).theta;
    auto& e = d.events[gen() % 2];
    e.confidence = std::min(1.0, e.confidence + 0.2);
    CHECK(match_schema(remote_schema(), d).theta >= before - 1e-6);
  }
}

TEST_CASE("grounding cap is flagged") {
  GroundingCaps caps;
  caps.max_bindings = 4;
  const Grounding g = ground_schema(remote_schema(), remote_doc(), caps);
  CHECK(g.program.truncated);
  CHECK(g.bindings.size() == 4);
  CHECK(match_schema(remote_schema(), remote_doc(), caps).truncated);
  caps.max_bindings = 0;
  CHECK_THROWS_AS(ground_schema(remote_schema(), remote_doc(), caps), PreconditionError);
}

TEST_CASE("rescale and combine") {
  CHECK(rescale_confidence(0.8, 3, 4) == 0.6);
  CHECK(rescale_confidence(0.8, 4, 4) == 0.8);
  CHECK(rescale_confidence(0.8, 0, 4) == 0.0);
  CHECK_THROWS_AS(rescale_confidence(0.8, 5, 4), PreconditionError);
  const std::vector<double> half = {0.5, 0.5};
  CHECK(combine_event_probability(half) == 0.75);
  const std::vector<double> sure = {1.0, 0.3};
  CHECK(combine_event_probability(sure) == 1.0);
  const std::vector<double> three = {0.3, 0.4, 0.2};
  CHECK(combine_event_probability(three) == doctest::Approx(1.0 - 0.7 * 0.6 * 0.8).epsilon(1e-15));
  CHECK(combine_event_probability(std::vector<double>{}) == 0.0);
}

TEST_CASE("prefilter agrees with exhaustive tf-idf scoring") {
  std::vector<Schema> lib = load_library(testing::fixture("library"));
  lib.resize(10);
  const SchemaIndex index(lib);
  const auto corpus = load_corpus(testing::fixture("synthetic/corpus.jsonl"));
  for (std::size_t k = 0; k < 60; ++k) {
    const DocumentGraph& d = corpus[k];
    const EventMultiset dm = event_multiset(d);
    std::vector<std::pair<double, std::string>> exhaustive;
    for (const auto& s : lib) {
      std::map<std::string, std::size_t> tf;
      for (const auto& st : s.steps) ++tf[st.event_type];
      double score = 0.0;
      bool shares = false;
      for (const auto& [t, n] : dm.counts) {
        if (!tf.contains(t)) continue;
        shares = true;
        std::size_t df = 0;
        for (const auto& o : lib)
          df += std::any_of(o.steps.begin(), o.steps.end(), [&](const Step& st) { return st.event_type == t; });
        const double idf = std::log(1.0 + 10.0 / static_cast<double>(df));
        score += static_cast<double>(n * tf[t]) * idf * idf;
      }
      if (shares) exhaustive.emplace_back(-score, s.id);
    }
    std::sort(exhaustive.begin(), exhaustive.end());
    const auto got = prefilter(lib, index, d, 10);
    REQUIRE(got.size() == exhaustive.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i]->id == exhaustive[i].second);
  }
  DocumentGraph none{"none", {ev("e", "Personnel.EndPosition.Unspecified", 1.0, {})}, {}};
  std::vector<Schema> one = {remote_schema()};
  CHECK(prefilter(one, SchemaIndex(one), none, 5).empty());
  CHECK(prefilter(one, SchemaIndex(one), remote_doc(), 5).front()->id == "Remote_Teaching");
  CHECK_THROWS_AS(prefilter({}, SchemaIndex({}), remote_doc(), 5), PreconditionError);
}

TEST_CASE("prefiltering changes which schemas run, never their results") {
  const std::vector<Schema> lib = load_library(testing::fixture("library"));
  auto docs = load_corpus(testing::fixture("synthetic/corpus.jsonl"));
  docs.resize(12);
  InferenceOptions opt;
  opt.top_k = 5;
  const auto out = infer_corpus(lib, docs, opt);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    CHECK(out[i].n_events == docs[i].events.size());
    for (const auto& m : out[i].matches) {
      const auto it = std::find_if(lib.begin(), lib.end(), [&](const Schema& s) { return s.id == m.schema_id; });
      const MatchResult direct = match_schema(*it, docs[i]);
      CHECK(direct.theta == m.theta);
      CHECK(direct.bindings == m.bindings);
    }
  }
}

TEST_CASE("parallel inference equals the serial reference and round trips through JSON") {
  const std::vector<Schema> lib = load_library(testing::fixture("library"));
  auto docs = load_corpus(testing::fixture("synthetic/corpus.jsonl"));
  docs.resize(30);
  const InferenceOptions opt;
  const auto par = infer_corpus(lib, docs, opt);
  const auto ser = infer_corpus_serial(lib, docs, opt);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(document_matches_to_json(par[i]) == document_matches_to_json(ser[i]));
    const json j = document_matches_to_json(par[i]);
    CHECK(document_matches_to_json(document_matches_from_json(j)) == j);
    for (const auto& [t, p] : par[i].predicted_events) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
}
