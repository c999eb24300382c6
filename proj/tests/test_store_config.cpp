#include <doctest.h>

#include <fstream>
#include <thread>

#include "evschema/config.hpp"
#include "evschema/error.hpp"
#include "evschema/store.hpp"
#include "support.hpp"

using namespace evschema;
namespace fs = std::filesystem;

TEST_CASE("storable ids") {
  CHECK(is_storable_id("CookMeal"));
  CHECK(is_storable_id("lib_001-a.v2"));
  CHECK_FALSE(is_storable_id(""));
  CHECK_FALSE(is_storable_id(".hidden"));
  CHECK_FALSE(is_storable_id("../etc"));
  CHECK_FALSE(is_storable_id("a/b"));
  CHECK_FALSE(is_storable_id("with space"));
}

TEST_CASE("store versions and optimistic concurrency") {
  testing::TempDir dir;
  LibraryStore store(dir.path());
  CHECK(store.list().empty());
  auto s = testing::fixture_schema("schemas/CookMeal.json");

  CHECK(store.put(s, 0) == 1);
  CHECK_THROWS_AS(store.put(s, 0), VersionConflict);
  s.description = "edited";
  CHECK(store.put(s, 1) == 2);
  try {
    store.put(s, 1);
    FAIL("expected a conflict");
  } catch (const VersionConflict& e) {
    CHECK(e.actual() == 2);
  }
  CHECK(store.put(s, std::nullopt) == 3);

  const auto got = store.get("CookMeal");
  REQUIRE(got);
  CHECK(got->second == 3);
  CHECK(got->first == s);
  CHECK_FALSE(store.get("nope"));

  auto bad = s;
  bad.id = "../x";
  CHECK_THROWS_AS(store.put(bad, 0), ParseError);

  CHECK_THROWS_AS(store.remove("CookMeal", 1), VersionConflict);
  CHECK(store.remove("CookMeal", 3));
  CHECK_FALSE(store.remove("CookMeal", std::nullopt));
  CHECK_FALSE(fs::exists(dir / "CookMeal.json"));
}

TEST_CASE("store reopens from its manifest") {
  testing::TempDir dir;
  {
    LibraryStore store(dir.path());
    store.put(testing::fixture_schema("schemas/CookMeal.json"), 0);
    auto r = testing::fixture_schema("schemas/Remote_Teaching.json");
    store.put(r, 0);
    store.put(r, 1);
  }
  LibraryStore again(dir.path());
  const auto l = again.list();
  REQUIRE(l.size() == 2);
  CHECK(l[0].id == "CookMeal");
  CHECK(l[0].version == 1);
  CHECK(l[1].version == 2);
  CHECK(again.load_all().size() == 2);
}

TEST_CASE("a lost manifest is rebuilt from the schema files") {
  testing::TempDir dir;
  {
    LibraryStore store(dir.path());
    auto s = testing::fixture_schema("schemas/CookMeal.json");
    store.put(s, 0);
    store.put(s, 1);
    store.put(testing::fixture_schema("schemas/CorruptionTrial.json"), 0);
  }
  fs::remove(dir / "manifest.json");
  {
    std::ofstream junk(dir / "notes.json");
    junk << "{\"not\": \"a schema\"}";
  }
  LibraryStore store(dir.path());
  const auto l = store.list();
  REQUIRE(l.size() == 2);
  for (const auto& e : l) CHECK(e.version == 1);
  CHECK(fs::exists(dir / "manifest.json"));

  // a file dropped in behind the store's back is picked up on reopen
  fs::copy_file(testing::fixture("schemas/DownloadComputerVirus.json"), dir / "DownloadComputerVirus.json");
  LibraryStore reopened(dir.path());
  CHECK(reopened.list().size() == 3);
  CHECK(reopened.get("CookMeal")->second == 1);
}

TEST_CASE("corrupt manifest triggers a rebuild") {
  testing::TempDir dir;
  {
    LibraryStore store(dir.path());
    store.put(testing::fixture_schema("schemas/CookMeal.json"), 0);
  }
  {
    std::ofstream m(dir / "manifest.json");
    m << "{ broken";
  }
  LibraryStore store(dir.path());
  CHECK(store.list().size() == 1);
}

TEST_CASE("concurrent writers see exactly one winner per version") {
  testing::TempDir dir;
  LibraryStore store(dir.path());
  const auto s = testing::fixture_schema("schemas/CookMeal.json");
  store.put(s, 0);
  std::atomic<int> wins{0}, conflicts{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&] {
      try {
        store.put(s, 1);
        ++wins;
      } catch (const VersionConflict&) {
        ++conflicts;
      }
    });
  for (auto& t : threads) t.join();
  CHECK(wins == 1);
  CHECK(conflicts == 7);
  CHECK(store.get("CookMeal")->second == 2);
}

TEST_CASE("load_library reads directories and single files") {
  const auto lib = load_library(testing::fixture("library"));
  CHECK(lib.size() == 232);
  CHECK(std::is_sorted(lib.begin(), lib.end(), [](const Schema& a, const Schema& b) { return a.id < b.id; }));
  CHECK(load_library(testing::fixture("schemas/CookMeal.json")).size() == 1);

  testing::TempDir dir;
  fs::copy_file(testing::fixture("schemas/CookMeal.json"), dir / "a.json");
  fs::copy_file(testing::fixture("schemas/CookMeal.json"), dir / "b.json");
  CHECK_THROWS_AS(load_library(dir.path()), ValidationError);
}

TEST_CASE("config defaults, file, environment precedence") {
  Config c;
  CHECK(c.mining.min_support == 10);
  CHECK(c.port == 8080);
  CHECK(c.inference.caps.unk_event_truth == 1.0);

  testing::TempDir dir;
  {
    std::ofstream f(dir / "cfg.json");
    f << R"({"min_support": 3, "port": 9000, "seed": 7, "thresholds": "0.5",})";
  }
  c = load_config(dir / "cfg.json");
  CHECK(c.mining.min_support == 3);
  CHECK(c.port == 9000);
  CHECK(c.seed == 7);

  std::map<std::string, std::string> env{{"EVSCHEMA_PORT", "9100"}, {"EVSCHEMA_SOLVER_TOLERANCE", "1e-6"}};
  c.apply_env([&](const std::string& k) -> std::optional<std::string> {
    auto it = env.find(k);
    if (it == env.end()) return std::nullopt;
    return it->second;
  });
  CHECK(c.port == 9100);
  CHECK(c.mining.min_support == 3);
  CHECK(c.inference.solver.tolerance == doctest::Approx(1e-6));

  // round trip through to_json
  Config d;
  d.apply_json(c.to_json());
  CHECK(d.to_json() == c.to_json());
}

TEST_CASE("config rejects unknown keys and bad values") {
  Config c;
  CHECK_THROWS_AS(c.apply_json(json{{"min_suport", 3}}), ParseError);
  CHECK_THROWS_AS(c.apply_json(json{{"min_support", -1}}), ParseError);
  CHECK_THROWS_AS(c.apply_json(json{{"port", "eighty"}}), ParseError);
  CHECK_THROWS_AS(c.apply_json(json::array()), ParseError);
  CHECK_THROWS_AS(c.apply_env([](const std::string& k) -> std::optional<std::string> {
                    if (k == "EVSCHEMA_MIN_SUPPORT") return "many";
                    return std::nullopt;
                  }),
                  ParseError);
}

TEST_CASE("draft saves stay flagged across reopen") {
  testing::TempDir dir;
  {
    LibraryStore store(dir.path());
    store.put(testing::fixture_schema("schemas/CookMeal.json"), 0, true);
    store.put(testing::fixture_schema("schemas/Remote_Teaching.json"), 0);
  }
  LibraryStore again(dir.path());
  auto l = again.list();
  REQUIRE(l.size() == 2);
  CHECK(l[0].draft);
  CHECK_FALSE(l[1].draft);
  again.put(testing::fixture_schema("schemas/CookMeal.json"), 1);
  CHECK_FALSE(again.list()[0].draft);
}
