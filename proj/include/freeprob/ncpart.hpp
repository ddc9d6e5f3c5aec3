#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "freeprob/scalar.hpp"

namespace freeprob::nc {

/// Largest ground set enumerate_noncrossing accepts unless overridden.
/// NC(14) has 2,674,440 elements.
inline constexpr int kDefaultMaxN = 14;

/// Partition of {1..n}.  Stored as a restricted growth string: label[i] is
/// the index of the block holding element i+1, and blocks are numbered in
/// order of their least element.  That string is the canonical form, so
/// equality, ordering and hashing all act on it.
class SetPartition {
 public:
  /// Validates that `blocks` are non-empty, disjoint and cover {1..n}.
  /// Block and element order in the argument are irrelevant.
  SetPartition(int n, const std::vector<std::vector<int>>& blocks);

  /// Any labelling of {1..n} by small integers; relabelled canonically.
  static SetPartition from_labels(std::span<const int> labels);

  static SetPartition singletons(int n);    // 0_n
  static SetPartition single_block(int n);  // 1_n

  int size() const { return static_cast<int>(labels_.size()); }
  int block_count() const { return block_count_; }
  int block_of(int element) const { return labels_[static_cast<std::size_t>(element - 1)]; }
  std::span<const std::uint8_t> labels() const { return labels_; }

  /// Blocks sorted by least element, elements ascending, 1-based.
  std::vector<std::vector<int>> blocks() const;
  std::vector<int> block_sizes() const;

  friend bool operator==(const SetPartition&, const SetPartition&) = default;
  friend auto operator<=>(const SetPartition& a, const SetPartition& b) {
    return a.labels_ <=> b.labels_;
  }

 private:
  explicit SetPartition(std::vector<std::uint8_t> canonical_labels);

  std::vector<std::uint8_t> labels_;
  int block_count_ = 0;
};

struct SetPartitionHash {
  std::size_t operator()(const SetPartition& p) const noexcept;
};

bool is_noncrossing(const SetPartition& p);

/// NC(n) in ascending canonical (restricted growth string) order.
/// Throws ResourceLimitError when n > max_n, DomainError when n < 1.
std::vector<SetPartition> enumerate_noncrossing(int n, int max_n = kDefaultMaxN);

BigInt catalan(unsigned m);

/// Refinement order: every block of p lies inside a block of q.
bool leq(const SetPartition& p, const SetPartition& q);

/// Calls `visit` for every non-crossing rho with p <= rho <= q.
void for_each_in_interval(const SetPartition& p, const SetPartition& q,
                          const std::function<void(const SetPartition&)>& visit);

std::vector<SetPartition> interval(const SetPartition& p, const SetPartition& q);

/// Moebius function of the NC(n) lattice.  Evaluated by recursive inversion
/// mu(rho, q) = -sum_{rho < sigma <= q} mu(sigma, q) over the interval and
/// memoized per (rho, q) in a process-wide, mutex-guarded table.
/// Both arguments must be non-crossing and satisfy leq(p, q).
BigInt mobius(const SetPartition& p, const SetPartition& q);

/// Number of (rho, q) entries currently memoized.
std::size_t mobius_cache_size();

/// Block sizes of the Kreweras complement K(p), in order of smallest element.
std::vector<int> kreweras_block_sizes(const SetPartition& p);

/// mu(p, 1_n) as the product over blocks V of K(p) of
/// (-1)^{|V|-1} catalan(|V|-1); agrees with mobius(p, 1_n).
BigInt mobius_to_top(const SetPartition& p);

/// NC(n) with mu(pi, 1_n) for each element, as consumed by the moment and
/// cumulant transforms.  Built once per n and then shared read-only.
struct NcTable {
  int n = 0;
  std::vector<SetPartition> partitions;
  std::vector<BigInt> mobius_to_top;
};

const NcTable& nc_table(int n, int max_n = kDefaultMaxN);

}  // namespace freeprob::nc
