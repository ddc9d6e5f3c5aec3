#include "freeprob/cumulants.hpp"

#include <algorithm>
#include <string>

#include "freeprob/ncpart.hpp"

namespace freeprob {
namespace {

void check_order(int order, int max_order) {
  if (order > max_order) {
    throw ResourceLimitError("order " + std::to_string(order) + " exceeds the configured maximum " +
                             std::to_string(max_order));
  }
}

template <Scalar T>
T mobius_weight(const BigInt& mu) {
  return from_rational<T>(Rational(mu));
}

// prod over blocks of values[|V|]
template <Scalar T>
T block_product(const nc::SetPartition& pi, std::span<const T> values) {
  T product(1);
  for (int size : pi.block_sizes()) product *= values[static_cast<std::size_t>(size - 1)];
  return product;
}

Word subword(std::span<const Letter> word, const std::vector<int>& block) {
  Word out;
  out.reserve(block.size());
  for (int e : block) out.push_back(word[static_cast<std::size_t>(e - 1)]);
  return out;
}

}  // namespace

template <Scalar T>
CumulantSequence<T> moments_to_cumulants(const MomentSequence<T>& m, int max_order) {
  check_order(m.order(), max_order);
  std::vector<T> kappa;
  kappa.reserve(static_cast<std::size_t>(m.order()));
  for (int n = 1; n <= m.order(); ++n) {
    const auto& table = nc::nc_table(n, std::max(max_order, n));
    T sum(0);
    for (std::size_t i = 0; i < table.partitions.size(); ++i) {
      sum += mobius_weight<T>(table.mobius_to_top[i]) * block_product<T>(table.partitions[i], m.values());
    }
    kappa.push_back(std::move(sum));
  }
  return CumulantSequence<T>(std::move(kappa));
}

template <Scalar T>
MomentSequence<T> cumulants_to_moments(const CumulantSequence<T>& k, int max_order) {
  check_order(k.order(), max_order);
  std::vector<T> moments;
  moments.reserve(static_cast<std::size_t>(k.order()));
  for (int n = 1; n <= k.order(); ++n) {
    const auto& table = nc::nc_table(n, std::max(max_order, n));
    T sum(0);
    for (const auto& pi : table.partitions) sum += block_product<T>(pi, k.values());
    moments.push_back(std::move(sum));
  }
  return MomentSequence<T>(std::move(moments));
}

template <Scalar T>
CumulantSequence<T> free_convolve(const CumulantSequence<T>& a, const CumulantSequence<T>& b) {
  if (a.order() != b.order()) {
    throw DomainError("free_convolve: orders differ (" + std::to_string(a.order()) + " vs " +
                      std::to_string(b.order()) + ")");
  }
  std::vector<T> sum;
  sum.reserve(static_cast<std::size_t>(a.order()));
  for (int n = 1; n <= a.order(); ++n) sum.push_back(a[n] + b[n]);
  return CumulantSequence<T>(std::move(sum));
}

Word word_from_string(std::string_view letters) {
  return Word(letters.begin(), letters.end());
}

template <Scalar T>
WordMomentOracle<T>::WordMomentOracle(std::vector<Letter> alphabet, int order, Eval eval)
    : alphabet_(std::move(alphabet)), order_(order), eval_(std::move(eval)) {
  std::sort(alphabet_.begin(), alphabet_.end());
  alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
  if (alphabet_.empty()) throw DomainError("oracle alphabet is empty");
  if (order_ < 1) throw DomainError("oracle order must be positive");
  if (!eval_) throw DomainError("oracle has no evaluation function");
}

template <Scalar T>
T WordMomentOracle<T>::operator()(std::span<const Letter> word) const {
  if (word.empty()) throw DomainError("oracle: empty word");
  if (static_cast<int>(word.size()) > order_) {
    throw DomainError("oracle: word of length " + std::to_string(word.size()) + " exceeds order " +
                      std::to_string(order_));
  }
  for (Letter l : word) {
    if (!std::binary_search(alphabet_.begin(), alphabet_.end(), l)) {
      throw DomainError("oracle: letter " + std::to_string(l) + " outside the alphabet");
    }
  }
  return eval_(word);
}

template <Scalar T>
T multivariate_cumulant(const WordMomentOracle<T>& oracle, std::span<const Letter> word, int max_order) {
  const int n = static_cast<int>(word.size());
  if (n == 0) throw DomainError("multivariate_cumulant: empty word");
  if (n > oracle.order()) {
    throw DomainError("multivariate_cumulant: word length " + std::to_string(n) + " exceeds oracle order " +
                      std::to_string(oracle.order()));
  }
  check_order(n, max_order);
  std::map<Word, T> memo;
  auto phi = [&](const Word& w) -> const T& {
    auto it = memo.find(w);
    if (it == memo.end()) it = memo.emplace(w, oracle(w)).first;
    return it->second;
  };
  const auto& table = nc::nc_table(n, std::max(max_order, n));
  T sum(0);
  for (std::size_t i = 0; i < table.partitions.size(); ++i) {
    T term = mobius_weight<T>(table.mobius_to_top[i]);
    for (const auto& block : table.partitions[i].blocks()) {
      term *= phi(subword(word, block));
      if (term == T(0)) break;
    }
    sum += term;
  }
  return sum;
}

template <Scalar T>
T max_mixed_cumulant(const WordMomentOracle<T>& oracle, int order, int max_order) {
  if (order > oracle.order()) throw DomainError("max_mixed_cumulant: order exceeds oracle order");
  const auto& alphabet = oracle.alphabet();
  const std::size_t letters = alphabet.size();
  T worst(0);
  for (int n = 2; n <= order && letters > 1; ++n) {
    std::vector<std::size_t> digits(static_cast<std::size_t>(n), 0);
    Word word(static_cast<std::size_t>(n));
    while (true) {
      const bool mixed = std::any_of(digits.begin(), digits.end(), [&](std::size_t d) { return d != digits[0]; });
      if (mixed) {
        for (int i = 0; i < n; ++i) word[i] = alphabet[digits[i]];
        T value = abs_value(multivariate_cumulant(oracle, word, max_order));
        if (value > worst) worst = std::move(value);
      }
      int pos = n - 1;
      while (pos >= 0 && ++digits[pos] == letters) digits[pos--] = 0;
      if (pos < 0) break;
    }
  }
  return worst;
}

template <Scalar T>
WordMomentOracle<T> free_family_oracle(const std::map<Letter, CumulantSequence<T>>& marginals, int max_order) {
  if (marginals.empty()) throw DomainError("free_family_oracle: no marginals");
  std::vector<Letter> alphabet;
  int order = max_order;
  for (const auto& [letter, kappa] : marginals) {
    alphabet.push_back(letter);
    order = std::min(order, kappa.order());
  }
  auto eval = [marginals, max_order](std::span<const Letter> word) -> T {
    const int n = static_cast<int>(word.size());
    const auto& table = nc::nc_table(n, std::max(max_order, n));
    T sum(0);
    for (const auto& pi : table.partitions) {
      T term(1);
      for (const auto& block : pi.blocks()) {
        const Letter first = word[static_cast<std::size_t>(block.front() - 1)];
        const bool pure = std::all_of(block.begin(), block.end(),
                                      [&](int e) { return word[static_cast<std::size_t>(e - 1)] == first; });
        if (!pure) {
          term = T(0);
          break;
        }
        term *= marginals.at(first)[static_cast<int>(block.size())];
      }
      sum += term;
    }
    return sum;
  };
  return WordMomentOracle<T>(std::move(alphabet), order, std::move(eval));
}

#define FREEPROB_INSTANTIATE(T)                                                                   \
  template CumulantSequence<T> moments_to_cumulants(const MomentSequence<T>&, int);              \
  template MomentSequence<T> cumulants_to_moments(const CumulantSequence<T>&, int);              \
  template CumulantSequence<T> free_convolve(const CumulantSequence<T>&, const CumulantSequence<T>&); \
  template class WordMomentOracle<T>;                                                             \
  template T multivariate_cumulant(const WordMomentOracle<T>&, std::span<const Letter>, int);    \
  template T max_mixed_cumulant(const WordMomentOracle<T>&, int, int);                           \
  template WordMomentOracle<T> free_family_oracle(const std::map<Letter, CumulantSequence<T>>&, int);

FREEPROB_INSTANTIATE(Rational)
FREEPROB_INSTANTIATE(double)

#undef FREEPROB_INSTANTIATE

}  // namespace freeprob
