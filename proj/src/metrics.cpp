#include "evschema/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "evschema/error.hpp"

namespace evschema {

TypeSet schema_event_types(const Schema& schema) {
  TypeSet out;
  for (const auto& st : schema.steps) out.insert(st.event_type);
  return out;
}

double sim(const EventMultiset& doc, const TypeSet& schema_types) {
  const std::size_t total = doc.total();
  if (total == 0) return 0.0;
  std::size_t hit = 0;
  for (const auto& [type, n] : doc.counts)
    if (schema_types.contains(type)) hit += n;
  return static_cast<double>(hit) / static_cast<double>(total);
}

double sim(const EventMultiset& doc, const Schema& schema) {
  return sim(doc, schema_event_types(schema));
}

std::string Stratum::label() const {
  if (hi == std::numeric_limits<std::size_t>::max()) return "[" + std::to_string(lo) + ",inf)";
  return "[" + std::to_string(lo) + "," + std::to_string(hi) + ")";
}

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::size_t parse_count(const std::string& s, std::string_view whole) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (s.empty() || pos != s.size()) throw ParseError(std::string(whole), "bad stratum bound '" + s + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<Stratum> parse_strata(std::string_view text) {
  std::vector<Stratum> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos)
      throw ParseError(std::string(text), "stratum '" + part + "' needs lo:hi");
    Stratum s;
    s.lo = parse_count(part.substr(0, colon), text);
    const std::string hi = part.substr(colon + 1);
    if (!hi.empty()) s.hi = parse_count(hi, text);
    if (s.lo == 0) throw ParseError(std::string(text), "strata start at 1");
    if (s.hi <= s.lo) throw ParseError(std::string(text), "empty stratum '" + part + "'");
    out.push_back(s);
  }
  std::vector<Stratum> sorted = out;
  std::sort(sorted.begin(), sorted.end(), [](const Stratum& a, const Stratum& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].lo < sorted[i - 1].hi) throw ParseError(std::string(text), "strata overlap");
  return out;
}

std::vector<double> parse_thresholds(std::string_view text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (part.empty() || pos != part.size()) throw ParseError(std::string(text), "bad threshold '" + part + "'");
    if (!(v > 0.0 && v <= 1.0)) throw PreconditionError("threshold " + part + " outside (0,1]");
    out.push_back(v);
  }
  return out;
}

std::vector<double> best_similarities_serial(std::span<const EventMultiset> corpus,
                                             std::span<const Schema> library) {
  std::vector<TypeSet> types;
  for (const auto& s : library) types.push_back(schema_event_types(s));
  std::vector<double> best(corpus.size(), 0.0);
  for (std::size_t d = 0; d < corpus.size(); ++d)
    for (const auto& t : types) best[d] = std::max(best[d], sim(corpus[d], t));
  return best;
}

std::vector<double> best_similarities(std::span<const EventMultiset> corpus,
                                      std::span<const Schema> library) {
  std::vector<TypeSet> types;
  for (const auto& s : library) types.push_back(schema_event_types(s));
  std::vector<double> best(corpus.size(), 0.0);
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t d = 0; d < n; ++d) {
    double b = 0.0;
    for (const auto& t : types) {
      b = std::max(b, sim(corpus[d], t));
      if (b >= 1.0) break;
    }
    best[d] = b;
  }
  return best;
}

namespace {

CoverageReport tabulate(std::span<const EventMultiset> corpus, std::span<const double> best,
                        std::span<const double> thresholds, std::span<const Stratum> strata) {
  if (corpus.empty()) throw PreconditionError("coverage needs a non-empty corpus");
  for (double t : thresholds)
    if (!(t > 0.0 && t <= 1.0)) throw PreconditionError("threshold outside (0,1]");
  CoverageReport r;
  r.thresholds.assign(thresholds.begin(), thresholds.end());
  const auto row = [&](const Stratum& s) {
    CoverageRow out;
    out.stratum = s;
    std::vector<std::size_t> hits(thresholds.size(), 0);
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      if (!s.contains(corpus[d].total())) continue;
      ++out.n_docs;
      for (std::size_t i = 0; i < thresholds.size(); ++i)
        if (best[d] >= thresholds[i]) ++hits[i];
    }
    for (std::size_t h : hits)
      out.coverage.push_back(out.n_docs == 0 ? 0.0
                                             : static_cast<double>(h) / static_cast<double>(out.n_docs));
    return out;
  };
  for (const auto& s : strata) r.strata.push_back(row(s));
  r.overall = row(Stratum{});
  return r;
}

}  // namespace

CoverageReport coverage(std::span<const EventMultiset> corpus, std::span<const Schema> library,
                        std::span<const double> thresholds, std::span<const Stratum> strata) {
  const auto best = best_similarities(corpus, library);
  return tabulate(corpus, best, thresholds, strata);
}

CoverageReport coverage_serial(std::span<const EventMultiset> corpus,
                               std::span<const Schema> library,
                               std::span<const double> thresholds,
                               std::span<const Stratum> strata) {
  const auto best = best_similarities_serial(corpus, library);
  return tabulate(corpus, best, thresholds, strata);
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

std::string format_coverage_table(const CoverageReport& report) {
  std::ostringstream out;
  if (!report.library_id.empty() || !report.corpus_id.empty())
    out << "library: " << report.library_id << "  corpus: " << report.corpus_id << "\n";
  out << pad("N_events", 12) << pad("docs", 8);
  for (double t : report.thresholds) out << pad("Cov@" + fmt("%.2g", t), 10);
  out << "\n";
  const auto line = [&](const CoverageRow& r, const std::string& name) {
    out << pad(name, 12) << pad(std::to_string(r.n_docs), 8);
    for (double c : r.coverage) out << pad(fmt("%.1f", 100.0 * c), 10);
    out << "\n";
  };
  for (const auto& r : report.strata) line(r, r.stratum.label());
  line(report.overall, "all");
  return out.str();
}

namespace {

json row_json(const CoverageRow& r, std::span<const double> thresholds) {
  json cov = json::object();
  for (std::size_t i = 0; i < thresholds.size(); ++i) cov[fmt("%g", thresholds[i])] = r.coverage[i];
  return {{"stratum", r.stratum.label()}, {"docs", r.n_docs}, {"coverage", std::move(cov)}};
}

}  // namespace

json coverage_to_json(const CoverageReport& report) {
  json strata = json::array();
  for (const auto& r : report.strata) strata.push_back(row_json(r, report.thresholds));
  return {{"library", report.library_id},
          {"corpus", report.corpus_id},
          {"thresholds", report.thresholds},
          {"strata", std::move(strata)},
          {"overall", row_json(report.overall, report.thresholds)}};
}

namespace {

void sort_ranked(std::vector<Ranked>& v) {
  std::sort(v.begin(), v.end(), [](const Ranked& a, const Ranked& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.id < b.id;
  });
}

}  // namespace

std::vector<Ranked> rank_schemas(const EventMultiset& doc, std::span<const Schema> library) {
  std::vector<Ranked> out;
  out.reserve(library.size());
  for (const auto& s : library) out.push_back({s.id, sim(doc, s)});
  sort_ranked(out);
  return out;
}

std::vector<Ranked> rank_documents(const Schema& schema, std::span<const EventMultiset> corpus) {
  const TypeSet types = schema_event_types(schema);
  std::vector<Ranked> out;
  out.reserve(corpus.size());
  for (const auto& d : corpus) out.push_back({d.doc_id, sim(d, types)});
  sort_ranked(out);
  return out;
}

double mrr(std::span<const std::size_t> ranks) {
  if (ranks.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t r : ranks) {
    if (r == 0) throw PreconditionError("ranks are 1-based");
    s += 1.0 / static_cast<double>(r);
  }
  return s / static_cast<double>(ranks.size());
}

double recall_at_k(std::span<const std::size_t> ranks, std::size_t k) {
  if (ranks.empty()) return 0.0;
  const auto hit = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r <= k; });
  return static_cast<double>(hit) / static_cast<double>(ranks.size());
}

double avg_rank(std::span<const std::size_t> ranks) {
  if (ranks.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t r : ranks) s += static_cast<double>(r);
  return s / static_cast<double>(ranks.size());
}

double ndcg(std::span<const std::string> ranked_ids, const std::set<std::string>& gold) {
  if (gold.empty()) throw PreconditionError("nDCG needs at least one gold item");
  double dcg = 0.0;
  for (std::size_t i = 0; i < ranked_ids.size(); ++i)
    if (gold.contains(ranked_ids[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  double idcg = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return dcg / idcg;
}

GoldLabels parse_gold_labels(std::istream& in) {
  GoldLabels out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos)
      throw ParseError("gold:" + std::to_string(lineno), "expected doc_id<TAB>schema_id");
    out[line.substr(0, tab)].insert(line.substr(tab + 1));
  }
  return out;
}

GoldLabels load_gold_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_gold_labels(in);
}

namespace {

struct Query {
  std::vector<std::string> ranked;
  std::set<std::string> gold;
};

RankingStats summarize(const std::vector<Query>& queries, std::span<const std::size_t> ks,
                       const Stratum& stratum) {
  RankingStats st;
  st.stratum = stratum;
  std::vector<std::size_t> first;
  std::map<std::size_t, double> recall_sum;
  double ndcg_sum = 0.0;
  for (const auto& q : queries) {
    if (q.gold.empty()) continue;
    std::size_t found = 0;
    std::vector<std::size_t> gold_ranks;
    for (std::size_t i = 0; i < q.ranked.size(); ++i)
      if (q.gold.contains(q.ranked[i])) gold_ranks.push_back(i + 1);
    // gold ids absent from the ranking count as ranked last
    found = gold_ranks.empty() ? q.ranked.size() + 1 : gold_ranks.front();
    first.push_back(found);
    for (std::size_t k : ks) {
      const auto in_k = std::count_if(gold_ranks.begin(), gold_ranks.end(),
                                      [k](std::size_t r) { return r <= k; });
      recall_sum[k] += static_cast<double>(in_k) / static_cast<double>(q.gold.size());
    }
    ndcg_sum += ndcg(q.ranked, q.gold);
    ++st.ndcg_queries;
  }
  st.queries = first.size();
  st.avg_rank = avg_rank(first);
  st.mrr = mrr(first);
  for (std::size_t k : ks)
    st.recall_at[k] = st.queries == 0 ? 0.0 : recall_sum[k] / static_cast<double>(st.queries);
  st.ndcg = st.ndcg_queries == 0 ? 0.0 : ndcg_sum / static_cast<double>(st.ndcg_queries);
  return st;
}

RankingStats evaluate_stratum(std::span<const EventMultiset> corpus, std::span<const Schema> library,
                              const GoldLabels& gold, RankMode mode,
                              std::span<const std::size_t> ks, const Stratum& stratum) {
  std::vector<Query> queries;
  if (mode == RankMode::Schemas) {
    for (const auto& d : corpus) {
      if (!stratum.contains(d.total())) continue;
      auto it = gold.find(d.doc_id);
      if (it == gold.end()) continue;
      Query q;
      for (const auto& r : rank_schemas(d, library)) q.ranked.push_back(r.id);
      q.gold = it->second;
      queries.push_back(std::move(q));
    }
  } else {
    std::vector<EventMultiset> docs;
    for (const auto& d : corpus)
      if (stratum.contains(d.total())) docs.push_back(d);
    for (const auto& s : library) {
      Query q;
      for (const auto& d : docs) {
        auto it = gold.find(d.doc_id);
        if (it != gold.end() && it->second.contains(s.id)) q.gold.insert(d.doc_id);
      }
      if (q.gold.empty()) continue;
      for (const auto& r : rank_documents(s, docs)) q.ranked.push_back(r.id);
      queries.push_back(std::move(q));
    }
  }
  return summarize(queries, ks, stratum);
}

}  // namespace

RankingReport evaluate_ranking(std::span<const EventMultiset> corpus,
                               std::span<const Schema> library, const GoldLabels& gold,
                               RankMode mode, std::span<const std::size_t> ks,
                               std::span<const Stratum> strata) {
  if (library.empty()) throw PreconditionError("ranking needs a non-empty library");
  RankingReport r;
  r.mode = mode;
  r.overall = evaluate_stratum(corpus, library, gold, mode, ks, Stratum{});
  for (const auto& s : strata) r.strata.push_back(evaluate_stratum(corpus, library, gold, mode, ks, s));
  return r;
}

std::string format_ranking_table(const RankingReport& report) {
  std::ostringstream out;
  out << "mode: " << (report.mode == RankMode::Schemas ? "schemas" : "documents") << "\n";
  out << pad("N_events", 12) << pad("queries", 9) << pad("AvgRank", 10) << pad("MRR", 8);
  for (const auto& [k, _] : report.overall.recall_at) out << pad("R@" + std::to_string(k), 8);
  out << pad("nDCG", 8) << "\n";
  const auto line = [&](const RankingStats& s, const std::string& name) {
    out << pad(name, 12) << pad(std::to_string(s.queries), 9) << pad(fmt("%.2f", s.avg_rank), 10)
        << pad(fmt("%.3f", s.mrr), 8);
    for (const auto& [k, v] : s.recall_at) out << pad(fmt("%.3f", v), 8);
    out << pad(fmt("%.3f", s.ndcg), 8) << "\n";
  };
  for (const auto& s : report.strata) line(s, s.stratum.label());
  line(report.overall, "all");
  return out.str();
}

namespace {

json stats_json(const RankingStats& s) {
  json rec = json::object();
  for (const auto& [k, v] : s.recall_at) rec[std::to_string(k)] = v;
  return {{"stratum", s.stratum.label()}, {"queries", s.queries}, {"avg_rank", s.avg_rank},
          {"mrr", s.mrr},                 {"recall_at", rec},     {"ndcg", s.ndcg},
          {"ndcg_queries", s.ndcg_queries}};
}

}  // namespace

json ranking_to_json(const RankingReport& report) {
  json strata = json::array();
  for (const auto& s : report.strata) strata.push_back(stats_json(s));
  return {{"mode", report.mode == RankMode::Schemas ? "schemas" : "documents"},
          {"overall", stats_json(report.overall)},
          {"strata", std::move(strata)}};
}

}  // namespace evschema
