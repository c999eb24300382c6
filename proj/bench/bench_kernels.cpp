#include <benchmark/benchmark.h>

#include <random>

#include "evschema/inference.hpp"
#include "evschema/ingest.hpp"
#include "evschema/metrics.hpp"
#include "evschema/mining.hpp"
#include "evschema/skeleton.hpp"
#include "evschema/store.hpp"

using namespace evschema;

namespace {

const std::filesystem::path kFixtures = EVSCHEMA_FIXTURES;

std::vector<EventMultiset> corpus_multisets(std::size_t n) {
  std::mt19937_64 g(1);
  std::vector<EventMultiset> out;
  for (std::size_t i = 0; i < n; ++i) {
    EventMultiset d;
    d.doc_id = "d" + std::to_string(i);
    const int k = 1 + static_cast<int>(g() % 20);
    for (int j = 0; j < k; ++j) ++d.counts["T" + std::to_string(g() % 60)];
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Schema> library_of(std::size_t n) {
  std::mt19937_64 g(2);
  std::vector<Schema> out;
  for (std::size_t i = 0; i < n; ++i) {
    Schema s;
    s.id = "s" + std::to_string(i);
    const int k = 3 + static_cast<int>(g() % 8);
    for (int j = 0; j < k; ++j) s.steps.push_back({"e" + std::to_string(j), "T" + std::to_string(g() % 60), {}, ""});
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Transaction> transactions(std::size_t n) {
  std::mt19937_64 g(3);
  std::vector<Transaction> out;
  for (std::size_t i = 0; i < n; ++i) {
    Transaction t;
    t.doc_id = "d" + std::to_string(i);
    std::set<std::string> items;
    const int k = 2 + static_cast<int>(g() % 6);
    for (int j = 0; j < k; ++j) items.insert("T" + std::to_string(g() % 25));
    t.items.assign(items.begin(), items.end());
    out.push_back(std::move(t));
  }
  return out;
}

void BM_best_similarities(benchmark::State& st) {
  const auto corpus = corpus_multisets(5000);
  const auto lib = library_of(232);
  for (auto _ : st) benchmark::DoNotOptimize(best_similarities(corpus, lib));
}
void BM_best_similarities_serial(benchmark::State& st) {
  const auto corpus = corpus_multisets(5000);
  const auto lib = library_of(232);
  for (auto _ : st) benchmark::DoNotOptimize(best_similarities_serial(corpus, lib));
}

const MiningConfig kMining{40, 2, 10};

void BM_mine(benchmark::State& st) {
  const auto txs = transactions(20000);
  const SpanSource src(txs);
  for (auto _ : st) benchmark::DoNotOptimize(mine_frequent(src, kMining));
}
void BM_mine_serial(benchmark::State& st) {
  const auto txs = transactions(20000);
  const SpanSource src(txs);
  for (auto _ : st) benchmark::DoNotOptimize(mine_frequent_serial(src, kMining));
}

struct ScoringInput {
  std::vector<FrequentItemset> itemsets;
  DenseScorer scorer{{}, {}};
};

const ScoringInput& scoring_input() {
  static const ScoringInput in = [] {
    ScoringInput s;
    const auto txs = transactions(20000);
    const SpanSource src(txs);
    s.itemsets = mine_frequent(src, kMining);
    std::vector<std::string> types;
    for (int i = 0; i < 25; ++i) types.push_back("T" + std::to_string(i));
    s.scorer = default_scorer(src, types);
    return s;
  }();
  return in;
}

void BM_score_candidates(benchmark::State& st) {
  const auto& in = scoring_input();
  for (auto _ : st) benchmark::DoNotOptimize(score_candidates(in.itemsets, in.scorer));
}
void BM_score_candidates_serial(benchmark::State& st) {
  const auto& in = scoring_input();
  for (auto _ : st) benchmark::DoNotOptimize(score_candidates_serial(in.itemsets, in.scorer));
}

struct InferenceInput {
  std::vector<Schema> library;
  std::vector<DocumentGraph> docs;
};

const InferenceInput& inference_input() {
  static const InferenceInput in = [] {
    InferenceInput s;
    s.library = load_library(kFixtures / "synthetic" / "library");
    s.docs = load_corpus(kFixtures / "synthetic" / "corpus.jsonl");
    s.docs.resize(100);
    return s;
  }();
  return in;
}

void BM_infer_corpus(benchmark::State& st) {
  const auto& in = inference_input();
  for (auto _ : st) benchmark::DoNotOptimize(infer_corpus(in.library, in.docs, {}));
}
void BM_infer_corpus_serial(benchmark::State& st) {
  const auto& in = inference_input();
  for (auto _ : st) benchmark::DoNotOptimize(infer_corpus_serial(in.library, in.docs, {}));
}

}  // namespace

BENCHMARK(BM_best_similarities)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_best_similarities_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mine)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mine_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_score_candidates)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_score_candidates_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_infer_corpus)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_infer_corpus_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
