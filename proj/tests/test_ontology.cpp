#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "evschema/error.hpp"
#include "evschema/ontology.hpp"
#include "support.hpp"

using namespace evschema;

namespace {

const char* kMinimal = R"({
  "format_version": 1,
  "entities": [{"id": "per"}],
  "events": [{"id": "Life.Die.Unspecified", "category": ["Life", "Die"],
              "roles": [{"name": "Victim", "types": ["per"], "min": 1, "max": 1}]}],
  "relations": []
})";

}  // namespace

TEST_CASE("minimal ontology loads with 1/1/0 counts") {
  const Ontology o = load_ontology(std::string_view(kMinimal));
  CHECK(o.event_types().size() == 1);
  CHECK(o.entity_types().size() == 1);
  CHECK(o.relation_types().empty());
  const RoleSlot* r = o.find_event("Life.Die.Unspecified")->find_role("Victim");
  REQUIRE(r != nullptr);
  CHECK(r->min_fillers == 1);
  CHECK(r->max_fillers == 1);
}

TEST_CASE("dangling entity type reference is reported by name") {
  json doc = json::parse(kMinimal);
  doc["events"][0]["roles"][0]["types"] = {"per2"};
  try {
    Ontology::from_json(doc);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    REQUIRE(e.problems().size() == 1);
    CHECK(e.problems()[0].find("per2") != std::string::npos);
  }
}

TEST_CASE("shape errors and duplicates") {
  json doc = json::parse(kMinimal);
  doc["format_version"] = 2;
  CHECK_THROWS_AS(Ontology::from_json(doc), ParseError);

  doc = json::parse(kMinimal);
  doc["entities"].push_back({{"id", "per"}});
  CHECK_THROWS_AS(Ontology::from_json(doc), ValidationError);

  doc = json::parse(kMinimal);
  doc["events"][0]["category"] = {"root"};
  CHECK_THROWS_AS(Ontology::from_json(doc), ValidationError);

  CHECK_THROWS_AS(load_ontology(std::string_view("{")), ParseError);
}

TEST_CASE("shipped fixture has the published type counts") {
  const Ontology& o = testing::ontology();
  CHECK(o.event_types().size() == 67);
  CHECK(o.entity_types().size() == 24);
  CHECK(o.relation_types().size() == 46);
}

TEST_CASE("event_types_in_category") {
  const Ontology& o = testing::ontology();
  CHECK(event_types_in_category(o, "root").size() == 67);

  // Counted in fixtures/ontology.json.
  std::vector<std::string> medical;
  for (const auto* e : event_types_in_category(o, "Medical")) medical.push_back(e->id);
  CHECK(medical == std::vector<std::string>{"Medical.Diagnosis.Unspecified",
                                            "Medical.Intervention.Unspecified",
                                            "Medical.Vaccinate.Unspecified"});

  auto leaf = event_types_in_category(o, "Life.Infect");
  REQUIRE(leaf.size() == 1);
  CHECK(leaf[0]->id == "Life.Infect.Unspecified");

  CHECK(event_types_in_category(o, "Contact").size() == 20);
  CHECK_THROWS_AS(event_types_in_category(o, "Nope"), PreconditionError);
}

TEST_CASE("category tree is consistent") {
  const Ontology& o = testing::ontology();
  const CategoryNode* root = o.find_category("root");
  REQUIRE(root != nullptr);
  std::size_t leaves = 0;
  for (const auto& node : o.category_tree()) leaves += node.events.size();
  CHECK(leaves == 67);
}

TEST_CASE("loading is deterministic and round-trips through to_json") {
  const std::string text = read_file(testing::fixture("ontology.json"));
  const Ontology a = load_ontology(std::string_view(text));
  const Ontology b = load_ontology(std::string_view(text));
  CHECK(a.to_json() == b.to_json());
  const Ontology c = Ontology::from_json(a.to_json());
  CHECK(c.to_json() == a.to_json());
}

TEST_CASE("property: every role type of random ontologies resolves or is rejected") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n_ent = 1 + static_cast<int>(gen() % 5);
    json doc = {{"format_version", 1}, {"relations", json::array()}};
    doc["entities"] = json::array();
    for (int i = 0; i < n_ent; ++i) doc["entities"].push_back({{"id", "t" + std::to_string(i)}});
    doc["events"] = json::array();
    bool dangling = false;
    for (int e = 0; e < 3; ++e) {
      json roles = json::array();
      for (int r = 0; r < 2; ++r) {
        // Occasionally point past the declared entity ids.
        const int t = static_cast<int>(gen() % (n_ent + 1));
        dangling |= t == n_ent;
        roles.push_back({{"name", "R" + std::to_string(r)}, {"types", {"t" + std::to_string(t)}}});
      }
      doc["events"].push_back({{"id", "C.E" + std::to_string(e) + ".Unspecified"},
                               {"category", {"C", "E" + std::to_string(e)}},
                               {"roles", roles}});
    }
    if (dangling) {
      CHECK_THROWS_AS(Ontology::from_json(doc), ValidationError);
      continue;
    }
    const Ontology o = Ontology::from_json(doc);
    for (const auto& ev : o.event_types())
      for (const auto& r : ev.roles)
        for (const auto& t : r.allowed_entity_types) CHECK(o.find_entity(t) != nullptr);
  }
}
