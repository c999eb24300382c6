#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "evschema/metrics.hpp"

namespace oracle {

/// sim written out longhand.
inline double sim(const evschema::EventMultiset& d, const evschema::Schema& s) {
  std::size_t hit = 0, all = 0;
  for (const auto& [type, n] : d.counts) {
    all += n;
    bool in = false;
    for (const auto& st : s.steps) in = in || st.event_type == type;
    if (in) hit += n;
  }
  return all == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(all);
}

/// Fraction of docs in [lo, hi) events having some schema with sim >= t.
inline double coverage(const std::vector<evschema::EventMultiset>& corpus,
                       const std::vector<evschema::Schema>& lib, double t, std::size_t lo,
                       std::size_t hi) {
  std::size_t in = 0, covered = 0;
  for (const auto& d : corpus) {
    const std::size_t n = d.total();
    if (n < lo || n >= hi) continue;
    ++in;
    for (const auto& s : lib)
      if (oracle::sim(d, s) >= t) {
        ++covered;
        break;
      }
  }
  return in == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(in);
}

inline double ndcg(const std::vector<std::string>& ranked, const std::set<std::string>& gold) {
  double dcg = 0.0, idcg = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i)
    if (gold.count(ranked[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  for (std::size_t i = 0; i < gold.size(); ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return dcg / idcg;
}

}  // namespace oracle
