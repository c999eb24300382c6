#include "evschema/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "evschema/error.hpp"

namespace evschema {

namespace {

// Strictly better, ignoring last-ulp noise from summation order.
bool better(double a, double b) { return a > b + 1e-12 * std::max(1.0, std::abs(b)); }

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

DenseScorer::DenseScorer(std::vector<std::string> types, std::vector<double> row_major)
    : types_(std::move(types)), table_(std::move(row_major)) {
  if (table_.size() != types_.size() * types_.size())
    throw PreconditionError("score table must be square over its type list");
  for (std::size_t i = 0; i < types_.size(); ++i)
    if (!index_.emplace(types_[i], i).second)
      throw PreconditionError("duplicate type '" + types_[i] + "' in score table");
}

double DenseScorer::cscore(std::string_view first, std::string_view second) const {
  auto a = index_.find(std::string(first));
  auto b = index_.find(std::string(second));
  if (a == index_.end() || b == index_.end()) return 0.0;
  return at(a->second, b->second);
}

void DenseScorer::save(std::ostream& out) const {
  for (std::size_t i = 0; i < types_.size(); ++i) out << (i ? "\t" : "") << types_[i];
  out << '\n';
  for (std::size_t i = 0; i < types_.size(); ++i) {
    for (std::size_t j = 0; j < types_.size(); ++j) out << (j ? "\t" : "") << format_real(at(i, j));
    out << '\n';
  }
}

DenseScorer DenseScorer::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1", "missing header of event type ids");
  std::vector<std::string> types;
  {
    std::istringstream header(line);
    for (std::string t; header >> t;) types.push_back(t);
  }
  std::vector<double> table;
  table.reserve(types.size() * types.size());
  for (std::size_t r = 0; r < types.size(); ++r) {
    if (!std::getline(in, line))
      throw ParseError("line " + std::to_string(r + 2), "missing score table row");
    std::istringstream row(line);
    for (std::size_t c = 0; c < types.size(); ++c) {
      double v;
      if (!(row >> v))
        throw ParseError("line " + std::to_string(r + 2), "expected " +
                                                               std::to_string(types.size()) +
                                                               " reals");
      table.push_back(v);
    }
  }
  return DenseScorer(std::move(types), std::move(table));
}

DenseScorer DenseScorer::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return load(in);
}

DenseScorer default_scorer(const TransactionSource& transactions,
                           std::span<const std::string> event_types) {
  std::vector<std::string> types(event_types.begin(), event_types.end());
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < types.size(); ++i) index.emplace(types[i], i);

  const std::size_t n = types.size();
  std::vector<double> single(n, 0.0), pair(n * n, 0.0);
  double total = 0.0;
  transactions.for_each([&](const std::vector<std::string>& items) {
    total += 1.0;
    std::vector<std::size_t> ids;
    for (const auto& i : items)
      if (auto it = index.find(i); it != index.end()) ids.push_back(it->second);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (auto a : ids) {
      single[a] += 1.0;
      for (auto b : ids)
        if (a != b) pair[a * n + b] += 1.0;
    }
  });

  std::vector<double> table(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const double joint = pair[a * n + b];
      if (a == b || joint == 0.0) continue;
      const double pmi =
          std::log((joint + 1.0) * (total + 1.0) / ((single[a] + 1.0) * (single[b] + 1.0)));
      table[a * n + b] = std::max(0.0, pmi);
    }
  return DenseScorer(std::move(types), std::move(table));
}

void BuilderConfig::validate() const {
  if (top_sequences == 0 || reuse_cap == 0 || top_chains == 0)
    throw PreconditionError("builder counts must be positive");
}

double score_sequence(std::span<const std::string> events, const PairScorer& scorer) {
  const std::size_t n = events.size();
  if (n < 2) throw PreconditionError("score_sequence needs at least two events");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += scorer.cscore(events[i], events[j]);
  return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

CandidateSequence order_itemset(const FrequentItemset& itemset, const PairScorer& scorer,
                                std::size_t origin) {
  std::vector<std::string> items = itemset.items;
  if (items.size() < 2) throw PreconditionError("cannot order an itemset of size < 2");
  std::sort(items.begin(), items.end());

  CandidateSequence best{items, score_sequence(items, scorer), origin};
  if (items.size() <= kExhaustiveOrderLimit) {
    while (std::next_permutation(items.begin(), items.end())) {
      const double s = score_sequence(items, scorer);
      if (better(s, best.score)) best = {items, s, origin};
    }
    return best;
  }

  std::vector<std::string> seq{items.front()};
  for (std::size_t k = 1; k < items.size(); ++k) {
    std::vector<std::string> chosen;
    double chosen_score = 0.0;
    for (std::size_t pos = 0; pos <= seq.size(); ++pos) {
      std::vector<std::string> trial = seq;
      trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(pos), items[k]);
      const double s = score_sequence(trial, scorer);
      if (chosen.empty() || better(s, chosen_score)) {
        chosen = std::move(trial);
        chosen_score = s;
      }
    }
    seq = std::move(chosen);
  }
  return {seq, score_sequence(seq, scorer), origin};
}

std::vector<CandidateSequence> score_candidates_serial(std::span<const FrequentItemset> itemsets,
                                                       const PairScorer& scorer) {
  std::vector<CandidateSequence> out;
  for (std::size_t i = 0; i < itemsets.size(); ++i)
    if (itemsets[i].items.size() >= 2) out.push_back(order_itemset(itemsets[i], scorer, i));
  return out;
}

std::vector<CandidateSequence> score_candidates(std::span<const FrequentItemset> itemsets,
                                                const PairScorer& scorer) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < itemsets.size(); ++i)
    if (itemsets[i].items.size() >= 2) eligible.push_back(i);
  std::vector<CandidateSequence> out(eligible.size());
  const auto n = static_cast<std::ptrdiff_t>(eligible.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    out[k] = order_itemset(itemsets[eligible[k]], scorer, eligible[k]);
  return out;
}

namespace {

void sort_by_score(std::vector<CandidateSequence>& c) {
  std::stable_sort(c.begin(), c.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.events < b.events;
  });
}

}  // namespace

std::vector<CandidateSequence> rank_and_diversify(std::vector<CandidateSequence> candidates,
                                                  const BuilderConfig& config) {
  config.validate();
  sort_by_score(candidates);
  std::map<std::string, std::size_t> used;
  std::vector<CandidateSequence> kept;
  for (auto& c : candidates) {
    if (kept.size() == config.top_sequences) break;
    const bool fresh = std::any_of(c.events.begin(), c.events.end(), [&](const auto& e) {
      auto it = used.find(e);
      return it == used.end() || it->second < config.reuse_cap;
    });
    if (!fresh) continue;
    for (const auto& e : std::set<std::string>(c.events.begin(), c.events.end())) ++used[e];
    kept.push_back(std::move(c));
  }
  return kept;
}

std::vector<SkeletonSchema> extend_chains(std::span<const CandidateSequence> kept,
                                          const PairScorer& scorer,
                                          std::span<const std::string> event_universe,
                                          const BuilderConfig& config) {
  config.validate();
  if (kept.empty()) throw PreconditionError("extend_chains needs at least one sequence");
  std::vector<std::string> universe(event_universe.begin(), event_universe.end());
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());

  std::map<std::string, std::vector<std::size_t>> by_head;  // in `kept` order
  for (std::size_t i = 0; i < kept.size(); ++i) by_head[kept[i].events.front()].push_back(i);

  struct Chain {
    std::vector<std::string> events;
    double score;
  };
  std::vector<Chain> chains(kept.size());
  const auto n = static_cast<std::ptrdiff_t>(kept.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto& seq = kept[s].events;
    std::vector<std::string> trial = seq;
    trial.push_back({});
    const std::string* best_event = nullptr;
    double best_score = 0.0;
    for (const auto& e : universe) {
      trial.back() = e;
      const double sc = score_sequence(trial, scorer);
      if (best_event == nullptr || better(sc, best_score)) {
        best_event = &e;
        best_score = sc;
      }
    }
    std::vector<std::string> joined = seq;
    if (best_event != nullptr) {
      if (auto it = by_head.find(*best_event); it != by_head.end()) {
        // The first other match is the highest scoring one: `kept` is ranked.
        for (std::size_t t : it->second) {
          if (static_cast<std::ptrdiff_t>(t) == s) continue;
          joined.insert(joined.end(), kept[t].events.begin(), kept[t].events.end());
          break;
        }
      }
    }
    chains[s] = {joined, score_sequence(joined, scorer)};
  }

  std::stable_sort(chains.begin(), chains.end(), [](const Chain& a, const Chain& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.events < b.events;
  });
  std::vector<SkeletonSchema> out;
  std::set<std::vector<std::string>> seen;
  for (auto& c : chains) {
    if (out.size() == config.top_chains) break;
    if (!seen.insert(c.events).second) continue;
    char id[32];
    std::snprintf(id, sizeof id, "sk%05zu", out.size() + 1);
    out.push_back({id, std::move(c.events), c.score});
  }
  return out;
}

void export_curation_queue(std::span<const SkeletonSchema> chains, const Ontology* ontology,
                           const std::filesystem::path& queue_path,
                           const std::filesystem::path& skeleton_path) {
  std::ostringstream queue, skel;
  for (std::size_t r = 0; r < chains.size(); ++r) {
    const auto& c = chains[r];
    queue << r + 1 << '\t' << c.id << '\t' << format_real(c.score) << '\t';
    for (std::size_t i = 0; i < c.events.size(); ++i) {
      const EventTypeDef* def = ontology ? ontology->find_event(c.events[i]) : nullptr;
      queue << (i ? " -> " : "") << (def && !def->label.empty() ? def->label : c.events[i]);
    }
    queue << '\n';
    skel << skeleton_to_json(c).dump() << '\n';
  }
  write_file_atomic(queue_path, queue.str());
  write_file_atomic(skeleton_path, skel.str());
}

std::vector<SkeletonSchema> read_skeletons(const std::filesystem::path& skeleton_path) {
  std::istringstream in(read_file(skeleton_path));
  std::vector<SkeletonSchema> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(skeleton_from_json(parse_json_lenient(line)));
    } catch (const ParseError& e) {
      throw ParseError(skeleton_path.string() + ":" + std::to_string(n), e.what());
    }
  }
  return out;
}

}  // namespace evschema
