#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "evschema/error.hpp"
#include "evschema/metrics.hpp"
#include "evschema/store.hpp"
#include "oracles/metrics_oracle.hpp"
#include "support.hpp"

using namespace evschema;

namespace {

Schema mk(const std::string& id, std::vector<std::string> types) {
  Schema s;
  s.id = id;
  s.name = id;
  int i = 0;
  for (auto& t : types) s.steps.push_back({"s" + std::to_string(i++), t, {}, ""});
  return s;
}

EventMultiset doc(const std::string& id, std::map<std::string, std::size_t> counts) {
  return EventMultiset{id, std::move(counts)};
}

// Three documents over three single-type schemas, small enough to rank by hand.
struct Tiny {
  std::vector<Schema> lib{mk("sa", {"A"}), mk("sb", {"B"}), mk("sc", {"C"})};
  std::vector<EventMultiset> corpus{doc("d1", {{"A", 2}, {"B", 1}}), doc("d2", {{"C", 1}}),
                                    doc("d3", {{"B", 1}, {"C", 3}})};
  GoldLabels gold{{"d1", {"sb"}}, {"d2", {"sa", "sc"}}, {"d3", {"sa"}}};
};

const double L3 = 1.0 / std::log2(3.0);

std::vector<EventMultiset> random_corpus(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<EventMultiset> out;
  for (std::size_t i = 0; i < n; ++i) {
    EventMultiset d;
    d.doc_id = "r" + std::to_string(i);
    const int k = std::uniform_int_distribution<int>(0, 12)(g);
    for (int j = 0; j < k; ++j) ++d.counts["T" + std::to_string(g() % 9)];
    out.push_back(d);
  }
  return out;
}

std::vector<Schema> random_library(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<Schema> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> types;
    const int k = std::uniform_int_distribution<int>(1, 4)(g);
    for (int j = 0; j < k; ++j) types.push_back("T" + std::to_string(g() % 9));
    out.push_back(mk("lib" + std::to_string(i), types));
  }
  return out;
}

}  // namespace

TEST_CASE("sim counts occurrences, not distinct types") {
  const auto d = doc("d", {{"Attack", 2}, {"Die", 1}, {"Arrest", 3}});
  CHECK(sim(d, mk("s", {"Attack", "Arrest"})) == doctest::Approx(5.0 / 6.0));
  CHECK(sim(doc("x", {{"A", 1}, {"B", 1}, {"C", 1}}), mk("s", {"A", "C", "Z"})) ==
        doctest::Approx(2.0 / 3.0));
  CHECK(sim(doc("e", {}), mk("s", {"A"})) == 0.0);
  CHECK(sim(d, mk("s", {})) == 0.0);
  // repeated step types do not double count
  CHECK(sim(d, mk("s", {"Die", "Die", "Die"})) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("sim agrees with the longhand oracle") {
  const auto corpus = random_corpus(200, 3);
  const auto lib = random_library(20, 4);
  for (const auto& d : corpus)
    for (const auto& s : lib) REQUIRE(sim(d, s) == doctest::Approx(oracle::sim(d, s)).epsilon(1e-12));
}

TEST_CASE("strata and threshold parsing") {
  const auto s = parse_strata("1:5,5:10,10:");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == Stratum{1, 5});
  CHECK(s[1] == Stratum{5, 10});
  CHECK(s[2].lo == 10);
  CHECK(s[2].contains(1000000));
  CHECK_FALSE(s[0].contains(5));
  CHECK_THROWS_AS(parse_strata("0:5"), ParseError);
  CHECK_THROWS_AS(parse_strata("1:5,4:8"), ParseError);
  CHECK_THROWS_AS(parse_strata("5:1"), ParseError);
  CHECK_THROWS_AS(parse_strata("x"), ParseError);
  CHECK(parse_strata("").empty());

  const auto t = parse_thresholds("0.5,0.8,1");
  CHECK(t == std::vector<double>{0.5, 0.8, 1.0});
  CHECK_THROWS_AS(parse_thresholds("0.5,abc"), ParseError);
  CHECK_THROWS_AS(parse_thresholds("0"), PreconditionError);
  CHECK_THROWS_AS(parse_thresholds("1.5"), PreconditionError);
}

TEST_CASE("coverage boundary cases") {
  const std::vector<EventMultiset> corpus{doc("a", {{"A", 1}, {"B", 1}}), doc("b", {{"C", 2}})};
  const std::vector<double> ts{0.1, 0.5, 1.0};
  const std::vector<Stratum> none;

  // every document's exact type set is in the library
  const std::vector<Schema> exact{mk("ab", {"A", "B"}), mk("c", {"C"})};
  const auto full = coverage(corpus, exact, ts, none);
  CHECK(full.overall.n_docs == 2);
  CHECK(full.overall.coverage == std::vector<double>{1.0, 1.0, 1.0});

  const std::vector<Schema> empty;
  const auto zero = coverage(corpus, empty, ts, none);
  CHECK(zero.overall.coverage == std::vector<double>{0.0, 0.0, 0.0});

  // half the events of "a", none of "b"
  const std::vector<Schema> half{mk("a", {"A"})};
  CHECK(coverage(corpus, half, ts, none).overall.coverage == std::vector<double>{0.5, 0.5, 0.0});

  const std::vector<EventMultiset> no_docs;
  CHECK_THROWS_AS(coverage(no_docs, exact, ts, none), PreconditionError);
  const std::vector<double> bad{0.0};
  CHECK_THROWS_AS(coverage(corpus, exact, bad, none), PreconditionError);
}

TEST_CASE("coverage matches the naive oracle per stratum") {
  const auto corpus = random_corpus(100, 11);
  const auto lib = random_library(10, 12);
  const std::vector<double> ts{0.2, 0.4, 0.5, 0.6, 0.8, 1.0};
  const auto strata = parse_strata("1:4,4:8,8:");
  const auto r = coverage(corpus, lib, ts, strata);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(r.overall.coverage[i] ==
          doctest::Approx(oracle::coverage(corpus, lib, ts[i], 1, std::numeric_limits<std::size_t>::max())));
    for (std::size_t k = 0; k < strata.size(); ++k)
      CHECK(r.strata[k].coverage[i] ==
            doctest::Approx(oracle::coverage(corpus, lib, ts[i], strata[k].lo, strata[k].hi)));
  }
  // empty documents fall outside every stratum
  std::size_t nonempty = 0;
  for (const auto& d : corpus) nonempty += d.total() > 0;
  CHECK(r.overall.n_docs == nonempty);
}

TEST_CASE("coverage is monotone in threshold and library") {
  const auto corpus = random_corpus(150, 21);
  const auto lib = random_library(12, 22);
  std::vector<double> ts;
  for (int i = 1; i <= 20; ++i) ts.push_back(i / 20.0);
  const std::vector<Stratum> none;
  const auto base = coverage(corpus, lib, ts, none);
  for (std::size_t i = 1; i < ts.size(); ++i)
    CHECK(base.overall.coverage[i] <= base.overall.coverage[i - 1]);

  auto bigger = lib;
  const auto extra = random_library(6, 23);
  bigger.insert(bigger.end(), extra.begin(), extra.end());
  const auto grown = coverage(corpus, bigger, ts, none);
  for (std::size_t i = 0; i < ts.size(); ++i)
    CHECK(grown.overall.coverage[i] >= base.overall.coverage[i]);
}

TEST_CASE("coverage ignores corpus and library order") {
  auto corpus = random_corpus(120, 31);
  auto lib = random_library(15, 32);
  const std::vector<double> ts{0.3, 0.6, 0.9};
  const auto strata = parse_strata("1:5,5:");
  const auto a = coverage(corpus, lib, ts, strata);
  std::mt19937_64 g(33);
  std::shuffle(corpus.begin(), corpus.end(), g);
  std::shuffle(lib.begin(), lib.end(), g);
  const auto b = coverage(corpus, lib, ts, strata);
  CHECK(a.overall.coverage == b.overall.coverage);
  for (std::size_t k = 0; k < strata.size(); ++k) CHECK(a.strata[k].coverage == b.strata[k].coverage);
}

TEST_CASE("parallel best similarities equal the serial reference") {
  const auto corpus = random_corpus(500, 41);
  const auto lib = random_library(40, 42);
  CHECK(best_similarities(corpus, lib) == best_similarities_serial(corpus, lib));
  const std::vector<double> ts{0.5};
  const auto strata = parse_strata("1:6,6:");
  const auto p = coverage(corpus, lib, ts, strata);
  const auto s = coverage_serial(corpus, lib, ts, strata);
  CHECK(p.overall.coverage == s.overall.coverage);
}

TEST_CASE("coverage on the synthetic corpus with its own library") {
  std::vector<EventMultiset> corpus;
  for (const auto& d : load_corpus(testing::fixture("synthetic/corpus.jsonl"))) corpus.push_back(event_multiset(d));
  const auto lib = load_library(testing::fixture("synthetic/library"));
  const std::vector<double> ts{0.5};
  const std::vector<Stratum> none;
  const auto r = coverage(corpus, lib, ts, none);
  CHECK(r.overall.coverage[0] == doctest::Approx(oracle::coverage(corpus, lib, 0.5, 1, SIZE_MAX)));
  CHECK(r.overall.coverage[0] > 0.9);
  const auto j = coverage_to_json(r);
  CHECK(j.contains("overall"));
  CHECK(format_coverage_table(r).find("Cov@0.5") != std::string::npos);
}

TEST_CASE("ranking primitives on hand fixtures") {
  const std::vector<std::size_t> ranks{1, 3, 2, 11};
  CHECK(mrr(ranks) == doctest::Approx((1.0 + 1.0 / 3 + 0.5 + 1.0 / 11) / 4).epsilon(1e-12));
  CHECK(avg_rank(ranks) == doctest::Approx(17.0 / 4));
  CHECK(recall_at_k(ranks, 1) == doctest::Approx(0.25));
  CHECK(recall_at_k(ranks, 10) == doctest::Approx(0.75));
  CHECK(recall_at_k(ranks, 11) == doctest::Approx(1.0));

  const std::vector<std::string> r{"a", "b", "c", "d", "e"};
  const std::set<std::string> g{"a", "c"};
  const double expected = (1.0 + 1.0 / std::log2(4.0)) / (1.0 + L3);
  CHECK(std::abs(ndcg(r, g) - expected) < 1e-9);
  CHECK(std::abs(ndcg(r, g) - oracle::ndcg(r, g)) < 1e-12);
  CHECK(ndcg(r, {"a"}) == 1.0);
  CHECK(std::abs(ndcg(r, {"e"}) - 1.0 / std::log2(6.0)) < 1e-12);
  CHECK(ndcg(r, {"zz"}) == 0.0);
  CHECK_THROWS_AS(ndcg(r, {}), PreconditionError);
}

TEST_CASE("ndcg agrees with the oracle on random rankings") {
  std::mt19937_64 g(51);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> ids;
    const int n = 1 + static_cast<int>(g() % 30);
    for (int i = 0; i < n; ++i) ids.push_back("x" + std::to_string(i));
    std::shuffle(ids.begin(), ids.end(), g);
    std::set<std::string> gold;
    const int k = 1 + static_cast<int>(g() % 5);
    for (int i = 0; i < k; ++i) gold.insert("x" + std::to_string(g() % (n + 3)));
    const double v = ndcg(ids, gold);
    REQUIRE(std::abs(v - oracle::ndcg(ids, gold)) < 1e-12);
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("random rankings give recall near k over n") {
  // a shuffled ranking of 82 schemas with one gold each
  std::mt19937_64 g(61);
  const std::size_t n = 82, trials = 100000;
  std::vector<std::size_t> ranks;
  for (std::size_t t = 0; t < trials; ++t) ranks.push_back(1 + g() % n);
  const double p = 10.0 / 82.0;
  const double sd = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(recall_at_k(ranks, 10) - p) < 5 * sd);
  CHECK(std::abs(mrr(ranks) - [&] {
          double h = 0;
          for (std::size_t i = 1; i <= n; ++i) h += 1.0 / static_cast<double>(i);
          return h / static_cast<double>(n);
        }()) < 0.005);
}

TEST_CASE("rank_schemas orders by sim then id") {
  Tiny t;
  const auto r = rank_schemas(t.corpus[1], t.lib);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == Ranked{"sc", 1.0});
  CHECK(r[1].id == "sa");
  CHECK(r[2].id == "sb");
  const auto d = rank_documents(t.lib[2], t.corpus);
  CHECK(d[0].id == "d2");
  CHECK(d[1].id == "d3");
  CHECK(d[1].sim == doctest::Approx(0.75));
  CHECK(d[2].id == "d1");
}

TEST_CASE("evaluate_ranking in schema mode") {
  Tiny t;
  const std::vector<std::size_t> ks{1, 2};
  const auto strata = parse_strata("1:3,3:");
  const auto r = evaluate_ranking(t.corpus, t.lib, t.gold, RankMode::Schemas, ks, strata);
  CHECK(r.overall.queries == 3);
  CHECK(r.overall.mrr == doctest::Approx(11.0 / 18.0).epsilon(1e-12));
  CHECK(r.overall.avg_rank == doctest::Approx(2.0));
  CHECK(r.overall.recall_at.at(1) == doctest::Approx(1.0 / 6.0));
  CHECK(r.overall.recall_at.at(2) == doctest::Approx(2.0 / 3.0));
  CHECK(std::abs(r.overall.ndcg - (L3 + 1.0 + 0.5) / 3.0) < 1e-9);
  CHECK(r.overall.ndcg_queries == 3);
  REQUIRE(r.strata.size() == 2);
  CHECK(r.strata[0].queries == 1);
  CHECK(r.strata[0].mrr == doctest::Approx(1.0));
  CHECK(r.strata[1].queries == 2);
  CHECK(r.strata[1].mrr == doctest::Approx(5.0 / 12.0));

  const auto j = ranking_to_json(r);
  CHECK(j.at("mode") == "schemas");
  CHECK(format_ranking_table(r).find("MRR") != std::string::npos);
}

TEST_CASE("evaluate_ranking in document mode") {
  Tiny t;
  const std::vector<std::size_t> ks{1, 2};
  const std::vector<Stratum> none;
  const auto r = evaluate_ranking(t.corpus, t.lib, t.gold, RankMode::Documents, ks, none);
  CHECK(r.overall.queries == 3);
  CHECK(r.overall.mrr == doctest::Approx(5.0 / 6.0));
  CHECK(r.overall.recall_at.at(1) == doctest::Approx(2.0 / 3.0));
  // sa: gold d2,d3 at ranks 2,3 of [d1,d2,d3]
  const double sa = (L3 + 0.5) / (1.0 + L3);
  CHECK(r.overall.recall_at.at(2) == doctest::Approx((0.5 + 1.0 + 1.0) / 3.0));
  CHECK(std::abs(r.overall.ndcg - (sa + 2.0) / 3.0) < 1e-9);
}

TEST_CASE("evaluate_ranking preconditions and gold without matches") {
  Tiny t;
  const std::vector<std::size_t> ks{1};
  const std::vector<Stratum> none;
  const std::vector<Schema> empty;
  CHECK_THROWS_AS(evaluate_ranking(t.corpus, empty, t.gold, RankMode::Schemas, ks, none), PreconditionError);
  GoldLabels gold{{"d1", {"nope"}}};
  const auto r = evaluate_ranking(t.corpus, t.lib, gold, RankMode::Schemas, ks, none);
  CHECK(r.overall.queries == 1);
  CHECK(r.overall.avg_rank == doctest::Approx(4.0));  // past the end of 3 schemas
  CHECK(r.overall.recall_at.at(1) == 0.0);
}

TEST_CASE("gold label parsing") {
  std::istringstream in("# header\n\nd1\ts1\nd1\ts2\r\nd2\ts3\n");
  const auto g = parse_gold_labels(in);
  CHECK(g.size() == 2);
  CHECK(g.at("d1") == std::set<std::string>{"s1", "s2"});
  std::istringstream bad("d1 s1\n");
  CHECK_THROWS_AS(parse_gold_labels(bad), ParseError);
  std::istringstream three("d1\ts1\tx\n");
  CHECK_THROWS_AS(parse_gold_labels(three), ParseError);
  CHECK(load_gold_labels(testing::fixture("synthetic/gold.tsv")).size() == 400);
}
