#include "evschema/mining.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "evschema/error.hpp"

namespace evschema {

void MiningConfig::validate() const {
  if (min_support < 1) throw PreconditionError("min_support must be >= 1");
  if (min_items < 1) throw PreconditionError("min_items must be >= 1");
  if (min_items > max_items) throw PreconditionError("min_items must not exceed max_items");
}

void FileSource::for_each(const Visitor& visit) const {
  std::ifstream in(path_);
  if (!in) throw Error("cannot open " + path_.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    visit(parse_transaction_line(line, n).items);
  }
}

void sort_itemsets(std::vector<FrequentItemset>& itemsets) {
  std::sort(itemsets.begin(), itemsets.end(), [](const auto& a, const auto& b) {
    if (a.support != b.support) return a.support > b.support;
    return a.items < b.items;
  });
}

namespace {

// Items are dense ranks: 0 is the most frequent item.
struct FpNode {
  int item = -1;
  std::size_t count = 0;
  int parent = -1;
  std::vector<int> children;
};

class FpTree {
 public:
  explicit FpTree(std::size_t n_items) : header_(n_items) { nodes_.push_back({}); }

  // `path` must be sorted by ascending rank.
  void insert(std::span<const int> path, std::size_t count) {
    int cur = 0;
    for (int item : path) {
      int next = -1;
      for (int c : nodes_[cur].children)
        if (nodes_[c].item == item) {
          next = c;
          break;
        }
      if (next < 0) {
        next = static_cast<int>(nodes_.size());
        nodes_.push_back({item, 0, cur, {}});
        nodes_[cur].children.push_back(next);
        header_[item].push_back(next);
      }
      nodes_[next].count += count;
      cur = next;
    }
  }

  std::size_t support(int item) const {
    std::size_t s = 0;
    for (int n : header_[item]) s += nodes_[n].count;
    return s;
  }

  std::size_t n_items() const { return header_.size(); }

  // Conditional tree for `item`, restricted to items frequent within it.
  FpTree conditional(int item, std::size_t min_support) const {
    std::vector<std::pair<std::vector<int>, std::size_t>> base;
    std::vector<std::size_t> freq(header_.size(), 0);
    for (int n : header_[item]) {
      std::vector<int> path;
      for (int p = nodes_[n].parent; p > 0; p = nodes_[p].parent) path.push_back(nodes_[p].item);
      std::reverse(path.begin(), path.end());
      for (int i : path) freq[i] += nodes_[n].count;
      base.emplace_back(std::move(path), nodes_[n].count);
    }
    FpTree cond(header_.size());
    for (auto& [path, count] : base) {
      std::vector<int> kept;
      for (int i : path)
        if (freq[i] >= min_support) kept.push_back(i);
      if (!kept.empty()) cond.insert(kept, count);
    }
    return cond;
  }

 private:
  std::vector<FpNode> nodes_;
  std::vector<std::vector<int>> header_;
};

struct RawItemset {
  std::vector<int> items;
  std::size_t support;
};

void grow(const FpTree& tree, int item, std::vector<int>& prefix, const MiningConfig& cfg,
          std::vector<RawItemset>& out) {
  const std::size_t support = tree.support(item);
  if (support < cfg.min_support) return;
  prefix.push_back(item);
  if (prefix.size() >= cfg.min_items) out.push_back({prefix, support});
  if (prefix.size() < cfg.max_items) {
    const FpTree cond = tree.conditional(item, cfg.min_support);
    for (int i = 0; i < static_cast<int>(cond.n_items()); ++i) grow(cond, i, prefix, cfg, out);
  }
  prefix.pop_back();
}

struct Prepared {
  std::vector<std::string> names;  // rank -> item
  FpTree tree{0};
};

Prepared build_tree(const TransactionSource& source, const MiningConfig& cfg) {
  std::map<std::string, std::size_t> counts;
  source.for_each([&](const std::vector<std::string>& items) {
    std::set<std::string> uniq(items.begin(), items.end());
    for (const auto& i : uniq) ++counts[i];
  });

  std::vector<std::pair<std::string, std::size_t>> frequent;
  for (auto& [item, c] : counts)
    if (c >= cfg.min_support) frequent.emplace_back(item, c);
  // map iteration is lexicographic, so a stable sort breaks ties by name
  std::stable_sort(frequent.begin(), frequent.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Prepared p;
  std::unordered_map<std::string, int> rank;
  for (std::size_t r = 0; r < frequent.size(); ++r) {
    p.names.push_back(frequent[r].first);
    rank.emplace(frequent[r].first, static_cast<int>(r));
  }
  p.tree = FpTree(frequent.size());
  std::vector<int> path;
  source.for_each([&](const std::vector<std::string>& items) {
    path.clear();
    for (const auto& i : items)
      if (auto it = rank.find(i); it != rank.end()) path.push_back(it->second);
    std::sort(path.begin(), path.end());
    path.erase(std::unique(path.begin(), path.end()), path.end());
    if (!path.empty()) p.tree.insert(path, 1);
  });
  return p;
}

std::vector<FrequentItemset> finish(const Prepared& p, std::vector<RawItemset>& raw) {
  std::vector<FrequentItemset> out;
  out.reserve(raw.size());
  for (auto& r : raw) {
    FrequentItemset f;
    f.support = r.support;
    for (int i : r.items) f.items.push_back(p.names[i]);
    std::sort(f.items.begin(), f.items.end());
    out.push_back(std::move(f));
  }
  sort_itemsets(out);
  return out;
}

}  // namespace

std::vector<FrequentItemset> mine_frequent_serial(const TransactionSource& source,
                                                  const MiningConfig& config) {
  config.validate();
  const Prepared p = build_tree(source, config);
  std::vector<RawItemset> raw;
  std::vector<int> prefix;
  for (int i = 0; i < static_cast<int>(p.tree.n_items()); ++i) grow(p.tree, i, prefix, config, raw);
  return finish(p, raw);
}

std::vector<FrequentItemset> mine_frequent(const TransactionSource& source,
                                           const MiningConfig& config) {
  config.validate();
  const Prepared p = build_tree(source, config);
  const int n = static_cast<int>(p.tree.n_items());
  std::vector<std::vector<RawItemset>> per_item(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    std::vector<int> prefix;
    grow(p.tree, i, prefix, config, per_item[static_cast<std::size_t>(i)]);
  }
  std::vector<RawItemset> raw;
  for (auto& v : per_item)
    for (auto& r : v) raw.push_back(std::move(r));
  return finish(p, raw);
}

std::vector<FrequentItemset> mine_frequent(std::span<const Transaction> transactions,
                                           const MiningConfig& config) {
  return mine_frequent(SpanSource(transactions), config);
}

std::vector<FrequentItemset> brute_force_frequent(std::span<const Transaction> transactions,
                                                  const MiningConfig& config) {
  config.validate();
  if (transactions.size() > kBruteForceMaxTransactions)
    throw PreconditionError("brute force limited to 1000 transactions");
  std::set<std::string> universe;
  for (const auto& t : transactions) universe.insert(t.items.begin(), t.items.end());
  if (universe.size() > kBruteForceMaxItems)
    throw PreconditionError("brute force limited to 16 distinct items");

  const std::vector<std::string> names(universe.begin(), universe.end());
  std::vector<std::uint32_t> masks;
  for (const auto& t : transactions) {
    std::uint32_t m = 0;
    for (const auto& i : t.items)
      m |= 1u << (std::lower_bound(names.begin(), names.end(), i) - names.begin());
    masks.push_back(m);
  }
  std::vector<FrequentItemset> out;
  const std::uint32_t n_subsets = 1u << names.size();
  for (std::uint32_t s = 1; s < n_subsets; ++s) {
    const auto k = static_cast<std::size_t>(std::popcount(s));
    if (k < config.min_items || k > config.max_items) continue;
    std::size_t support = 0;
    for (auto m : masks) support += (m & s) == s;
    if (support < config.min_support) continue;
    FrequentItemset f{{}, support};
    for (std::size_t b = 0; b < names.size(); ++b)
      if (s & (1u << b)) f.items.push_back(names[b]);
    out.push_back(std::move(f));
  }
  sort_itemsets(out);
  return out;
}

void write_itemsets(std::ostream& out, const std::vector<FrequentItemset>& itemsets) {
  for (const auto& f : itemsets) {
    out << f.support;
    for (const auto& i : f.items) out << '\t' << i;
    out << '\n';
  }
}

std::vector<FrequentItemset> read_itemsets(std::istream& in) {
  std::vector<FrequentItemset> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    FrequentItemset f;
    if (!(fields >> f.support)) throw ParseError("line " + std::to_string(n), "expected support");
    for (std::string item; fields >> item;) f.items.push_back(item);
    std::sort(f.items.begin(), f.items.end());
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace evschema
