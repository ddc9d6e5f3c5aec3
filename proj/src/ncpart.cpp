#include "freeprob/ncpart.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>

#include "freeprob/error.hpp"

namespace freeprob::nc {
namespace {

constexpr int kMaxGroundSet = 255;
constexpr int kUnassigned = -1;

void check_ground_set(int n) {
  if (n < 1) throw DomainError("partition ground set size must be positive, got " + std::to_string(n));
  if (n > kMaxGroundSet) throw ResourceLimitError("partition ground set size exceeds 255");
}

// Stack scan over the labelled elements (unassigned ones are skipped).  A
// block popped while it still has later elements interleaves with the block
// being revisited.
bool labels_cross(std::span<const int> labels) {
  const int n = static_cast<int>(labels.size());
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  if (max_label < 1) return false;
  std::vector<int> last(static_cast<std::size_t>(max_label) + 1, -1);
  std::vector<char> seen(last.size(), 0);
  for (int i = 0; i < n; ++i) {
    if (labels[i] != kUnassigned) last[labels[i]] = i;
  }
  std::vector<int> stack;
  stack.reserve(last.size());
  for (int i = 0; i < n; ++i) {
    const int b = labels[i];
    if (b == kUnassigned) continue;
    if (!seen[b]) {
      seen[b] = 1;
      stack.push_back(b);
    } else {
      while (stack.back() != b) {
        if (last[stack.back()] > i) return true;
        stack.pop_back();
      }
    }
    if (last[b] == i) stack.pop_back();
  }
  return false;
}

// Generates NC partitions by choosing the block of each pending interval's
// first element; the gaps between consecutive chosen elements, and the tail
// after the last one, become independent sub-intervals.
class NcGenerator {
 public:
  explicit NcGenerator(int n) : labels_(static_cast<std::size_t>(n), kUnassigned) {}

  std::vector<SetPartition> run() {
    const int n = static_cast<int>(labels_.size());
    next_interval({{0, n - 1}}, 0);
    std::sort(out_.begin(), out_.end());
    return std::move(out_);
  }

 private:
  using Pending = std::vector<std::pair<int, int>>;

  void next_interval(Pending pending, int next_label) {
    while (!pending.empty() && pending.back().first > pending.back().second) pending.pop_back();
    if (pending.empty()) {
      out_.push_back(SetPartition::from_labels(labels_));
      return;
    }
    const auto [lo, hi] = pending.back();
    pending.pop_back();
    labels_[lo] = next_label;
    grow(pending, lo, hi, next_label);
  }

  // The block `label` currently ends at `last`; elements (last, hi] are free.
  void grow(const Pending& pending, int last, int hi, int label) {
    Pending closed = pending;
    closed.emplace_back(last + 1, hi);
    next_interval(std::move(closed), label + 1);
    for (int b = last + 1; b <= hi; ++b) {
      labels_[b] = label;
      Pending extended = pending;
      extended.emplace_back(last + 1, b - 1);
      grow(extended, b, hi, label);
    }
  }

  std::vector<int> labels_;
  std::vector<SetPartition> out_;
};

struct IntervalKey {
  SetPartition lower;
  SetPartition upper;
  bool operator==(const IntervalKey&) const = default;
};

struct IntervalKeyHash {
  std::size_t operator()(const IntervalKey& k) const noexcept {
    SetPartitionHash h;
    return h(k.lower) * 1000003U ^ h(k.upper);
  }
};

class MobiusCache {
 public:
  BigInt get(const SetPartition& p, const SetPartition& q) {
    std::lock_guard lock(mutex_);
    if (auto it = table_.find({p, q}); it != table_.end()) return it->second;
    fill_down_to(p, q);
    return table_.at({p, q});
  }

  std::size_t size() {
    std::lock_guard lock(mutex_);
    return table_.size();
  }

 private:
  // Computes mu(rho, q) for every rho in [p, q], coarsest first.
  void fill_down_to(const SetPartition& p, const SetPartition& q) {
    std::vector<SetPartition> members = interval(p, q);
    std::stable_sort(members.begin(), members.end(), [](const SetPartition& a, const SetPartition& b) {
      return a.block_count() < b.block_count();
    });
    for (const auto& rho : members) {
      IntervalKey key{rho, q};
      if (table_.contains(key)) continue;
      BigInt value = 0;
      if (rho == q) {
        value = 1;
      } else {
        for_each_in_interval(rho, q, [&](const SetPartition& sigma) {
          if (sigma != rho) value -= table_.at({sigma, q});
        });
      }
      table_.emplace(std::move(key), std::move(value));
    }
  }

  std::mutex mutex_;
  std::unordered_map<IntervalKey, BigInt, IntervalKeyHash> table_;
};

MobiusCache& mobius_cache() {
  static MobiusCache cache;
  return cache;
}

}  // namespace

SetPartition::SetPartition(std::vector<std::uint8_t> canonical_labels) : labels_(std::move(canonical_labels)) {
  int max_label = -1;
  for (auto l : labels_) max_label = std::max(max_label, static_cast<int>(l));
  block_count_ = max_label + 1;
}

SetPartition::SetPartition(int n, const std::vector<std::vector<int>>& blocks) {
  check_ground_set(n);
  std::vector<int> labels(static_cast<std::size_t>(n), kUnassigned);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw DomainError("partition has an empty block");
    for (int e : blocks[b]) {
      if (e < 1 || e > n) {
        throw DomainError("element " + std::to_string(e) + " outside {1.." + std::to_string(n) + "}");
      }
      if (labels[e - 1] != kUnassigned) throw DomainError("element " + std::to_string(e) + " appears twice");
      labels[e - 1] = static_cast<int>(b);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (labels[i] == kUnassigned) throw DomainError("element " + std::to_string(i + 1) + " is not covered");
  }
  *this = from_labels(labels);
}

SetPartition SetPartition::from_labels(std::span<const int> labels) {
  check_ground_set(static_cast<int>(labels.size()));
  std::map<int, std::uint8_t> relabel;
  std::vector<std::uint8_t> canonical;
  canonical.reserve(labels.size());
  for (int l : labels) {
    auto [it, inserted] = relabel.try_emplace(l, static_cast<std::uint8_t>(relabel.size()));
    canonical.push_back(it->second);
  }
  return SetPartition(std::move(canonical));
}

SetPartition SetPartition::singletons(int n) {
  check_ground_set(n);
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[i] = static_cast<std::uint8_t>(i);
  return SetPartition(std::move(labels));
}

SetPartition SetPartition::single_block(int n) {
  check_ground_set(n);
  return SetPartition(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0));
}

std::vector<std::vector<int>> SetPartition::blocks() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(block_count_));
  for (std::size_t i = 0; i < labels_.size(); ++i) out[labels_[i]].push_back(static_cast<int>(i) + 1);
  return out;
}

std::vector<int> SetPartition::block_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(block_count_), 0);
  for (auto l : labels_) ++sizes[l];
  return sizes;
}

std::size_t SetPartitionHash::operator()(const SetPartition& p) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (auto l : p.labels()) {
    h ^= l;
    h *= 1099511628211ULL;
  }
  return h;
}

bool is_noncrossing(const SetPartition& p) {
  std::vector<int> labels(p.labels().begin(), p.labels().end());
  return !labels_cross(labels);
}

std::vector<SetPartition> enumerate_noncrossing(int n, int max_n) {
  if (n < 1) throw DomainError("NC(n) requires n >= 1");
  if (n > max_n) {
    throw ResourceLimitError("NC(" + std::to_string(n) + ") exceeds the configured maximum n = " +
                             std::to_string(max_n));
  }
  check_ground_set(n);
  return NcGenerator(n).run();
}

BigInt catalan(unsigned m) {
  BigInt c = 1;
  for (unsigned k = 0; k < m; ++k) {
    c = c * 2 * (2 * k + 1) / (k + 2);
  }
  return c;
}

bool leq(const SetPartition& p, const SetPartition& q) {
  if (p.size() != q.size()) throw ContractViolation("leq: partitions of different ground sets");
  // Each block of p must map into a single block of q.
  std::vector<int> image(static_cast<std::size_t>(p.block_count()), kUnassigned);
  for (int e = 1; e <= p.size(); ++e) {
    int& target = image[p.block_of(e)];
    if (target == kUnassigned) {
      target = q.block_of(e);
    } else if (target != q.block_of(e)) {
      return false;
    }
  }
  return true;
}

void for_each_in_interval(const SetPartition& p, const SetPartition& q,
                          const std::function<void(const SetPartition&)>& visit) {
  if (!leq(p, q)) return;
  const auto blocks = p.blocks();
  const int n = p.size();
  std::vector<int> labels(static_cast<std::size_t>(n), kUnassigned);
  std::vector<int> group_home;  // q-block of each group

  std::function<void(std::size_t)> assign = [&](std::size_t j) {
    if (j == blocks.size()) {
      visit(SetPartition::from_labels(labels));
      return;
    }
    const auto& block = blocks[j];
    const int home = q.block_of(block.front());
    const int groups = static_cast<int>(group_home.size());
    for (int g = 0; g <= groups; ++g) {
      if (g < groups && group_home[g] != home) continue;
      for (int e : block) labels[e - 1] = g;
      if (!labels_cross(labels)) {
        if (g == groups) group_home.push_back(home);
        assign(j + 1);
        if (g == groups) group_home.pop_back();
      }
    }
    for (int e : block) labels[e - 1] = kUnassigned;
  };
  assign(0);
}

std::vector<SetPartition> interval(const SetPartition& p, const SetPartition& q) {
  std::vector<SetPartition> out;
  for_each_in_interval(p, q, [&](const SetPartition& r) { out.push_back(r); });
  return out;
}

BigInt mobius(const SetPartition& p, const SetPartition& q) {
  if (p.size() != q.size()) throw ContractViolation("mobius: partitions of different ground sets");
  if (!is_noncrossing(p) || !is_noncrossing(q)) throw ContractViolation("mobius: arguments must be non-crossing");
  if (!leq(p, q)) throw ContractViolation("mobius: requires p <= q");
  return mobius_cache().get(p, q);
}

std::size_t mobius_cache_size() { return mobius_cache().size(); }

std::vector<int> kreweras_block_sizes(const SetPartition& p) {
  const int n = p.size();
  // Blocks as cyclic permutations in increasing order; K(p) has the cycle
  // type of p^{-1} gamma with gamma = (1 2 ... n).
  std::vector<int> inverse(static_cast<std::size_t>(n));
  for (const auto& block : p.blocks()) {
    for (std::size_t j = 0; j < block.size(); ++j) {
      const int next = block[(j + 1) % block.size()];
      inverse[static_cast<std::size_t>(next - 1)] = block[j] - 1;
    }
  }
  std::vector<int> sizes;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int start = 0; start < n; ++start) {
    int len = 0;
    for (int i = start; !seen[static_cast<std::size_t>(i)]; i = inverse[static_cast<std::size_t>((i + 1) % n)]) {
      seen[static_cast<std::size_t>(i)] = true;
      ++len;
    }
    if (len > 0) sizes.push_back(len);
  }
  return sizes;
}

BigInt mobius_to_top(const SetPartition& p) {
  if (!is_noncrossing(p)) throw DomainError("mobius_to_top: partition is crossing");
  BigInt mu = 1;
  for (int len : kreweras_block_sizes(p)) {
    mu *= catalan(static_cast<unsigned>(len - 1));
    if (len % 2 == 0) mu = -mu;
  }
  return mu;
}

const NcTable& nc_table(int n, int max_n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<NcTable>> tables;
  std::lock_guard lock(mutex);
  if (auto it = tables.find(n); it != tables.end()) return *it->second;
  auto table = std::make_unique<NcTable>();
  table->n = n;
  table->partitions = enumerate_noncrossing(n, max_n);
  table->mobius_to_top.reserve(table->partitions.size());
  for (const auto& pi : table->partitions) table->mobius_to_top.push_back(mobius_to_top(pi));
  return *tables.emplace(n, std::move(table)).first->second;
}

}  // namespace freeprob::nc
