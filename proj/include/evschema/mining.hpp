#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "evschema/ingest.hpp"

namespace evschema {

struct MiningConfig {
  std::size_t min_support = 10;  // absolute transaction count
  std::size_t min_items = 2;
  std::size_t max_items = 10;

  void validate() const;
};

struct FrequentItemset {
  std::vector<std::string> items;  // sorted
  std::size_t support = 0;
  bool operator==(const FrequentItemset&) const = default;
};

/// Replayable transaction stream; FP-growth reads it twice (item counts, then
/// tree construction) so the raw corpus never has to sit in memory.
class TransactionSource {
 public:
  using Visitor = std::function<void(const std::vector<std::string>& items)>;
  virtual ~TransactionSource() = default;
  virtual void for_each(const Visitor& visit) const = 0;
};

class SpanSource final : public TransactionSource {
 public:
  explicit SpanSource(std::span<const Transaction> txs) : txs_(txs) {}
  void for_each(const Visitor& visit) const override {
    for (const auto& t : txs_) visit(t.items);
  }

 private:
  std::span<const Transaction> txs_;
};

/// Transactions file: one `doc_id<TAB>chain_id<TAB>item item ...` per line.
class FileSource final : public TransactionSource {
 public:
  explicit FileSource(std::filesystem::path path) : path_(std::move(path)) {}
  void for_each(const Visitor& visit) const override;

 private:
  std::filesystem::path path_;
};

/// Support desc, then lexicographic item lists.
void sort_itemsets(std::vector<FrequentItemset>& itemsets);

/// FP-growth. Conditional trees of the top-level header items are mined in
/// parallel; the sorted output is identical to the serial run.
std::vector<FrequentItemset> mine_frequent(const TransactionSource& source,
                                           const MiningConfig& config);
std::vector<FrequentItemset> mine_frequent(std::span<const Transaction> transactions,
                                           const MiningConfig& config);
/// Single-threaded FP-growth, kept as the reference for the parallel kernel.
std::vector<FrequentItemset> mine_frequent_serial(const TransactionSource& source,
                                                  const MiningConfig& config);

inline constexpr std::size_t kBruteForceMaxItems = 16;
inline constexpr std::size_t kBruteForceMaxTransactions = 1000;

/// Enumerates every subset of the item universe. Throws PreconditionError
/// beyond 16 distinct items or 1000 transactions.
std::vector<FrequentItemset> brute_force_frequent(std::span<const Transaction> transactions,
                                                  const MiningConfig& config);

void write_itemsets(std::ostream& out, const std::vector<FrequentItemset>& itemsets);
std::vector<FrequentItemset> read_itemsets(std::istream& in);

}  // namespace evschema
