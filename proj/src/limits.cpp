#include "freeprob/limits.hpp"

#include <algorithm>
#include <string>

#include "freeprob/error.hpp"

namespace freeprob {
namespace {

const ArrayFamily& family_at(const TriangularArraySpec& spec, std::size_t i) {
  if (i >= spec.families.size()) {
    throw DomainError("family index " + std::to_string(i) + " out of range (" +
                      std::to_string(spec.families.size()) + " families)");
  }
  const auto& f = spec.families[i];
  if (f.lambda < 0) throw DomainError("family rate lambda must be non-negative");
  return f;
}

void check_row_length(const ArrayFamily& f, std::int64_t N) {
  if (N < 1 || Rational(N) <= f.lambda) {
    throw DomainError("row length N = " + std::to_string(N) + " must exceed lambda = " + to_string(f.lambda));
  }
}

}  // namespace

template <Scalar T>
MomentSequence<T> row_cell_moments(const TriangularArraySpec& spec, std::size_t family, std::int64_t N, int order) {
  const auto& f = family_at(spec, family);
  check_row_length(f, N);
  if (order < 1) throw DomainError("order must be positive");
  const T trace = from_rational<T>(Rational(f.lambda / N));
  const T alpha = from_rational<T>(f.alpha);
  std::vector<T> m;
  m.reserve(static_cast<std::size_t>(order));
  for (int n = 1; n <= order; ++n) m.push_back(ipow(alpha, n) * trace);
  return MomentSequence<T>(std::move(m));
}

template <Scalar T>
CumulantSequence<T> row_sum_cumulants(const TriangularArraySpec& spec, std::size_t family, std::int64_t N, int order,
                                      int max_order) {
  const auto cell = moments_to_cumulants(row_cell_moments<T>(spec, family, N, order), max_order);
  const T rows = from_rational<T>(Rational(N));
  std::vector<T> kappa;
  kappa.reserve(static_cast<std::size_t>(order));
  for (int n = 1; n <= order; ++n) kappa.push_back(rows * cell[n]);
  return CumulantSequence<T>(std::move(kappa));
}

template <Scalar T>
std::vector<ConvergenceRow<T>> convergence_table(const TriangularArraySpec& spec, std::size_t family,
                                                 std::span<const std::int64_t> Ns, int order, int max_order) {
  const auto& f = family_at(spec, family);
  for (auto N : Ns) check_row_length(f, N);
  const T lambda = from_rational<T>(f.lambda);
  const T alpha = from_rational<T>(f.alpha);
  std::vector<ConvergenceRow<T>> rows;
  rows.reserve(Ns.size() * static_cast<std::size_t>(order));
  for (auto N : Ns) {
    const auto kappa = row_sum_cumulants<T>(spec, family, N, order, max_order);
    for (int n = 1; n <= order; ++n) {
      rows.push_back({N, n, kappa[n], abs_value(T(kappa[n] - lambda * ipow(alpha, n)))});
    }
  }
  return rows;
}

template <Scalar T>
WordMomentOracle<T> orthogonal_cell_oracle(const TriangularArraySpec& spec, std::int64_t N, int order) {
  if (!spec.orthogonal) {
    throw DomainError(
        "joint laws are only determined for orthogonal families; set \"orthogonal\": true or query one family");
  }
  if (spec.families.empty()) throw DomainError("array has no families");
  std::vector<Letter> alphabet;
  std::vector<T> traces;
  std::vector<T> alphas;
  for (std::size_t i = 0; i < spec.families.size(); ++i) {
    const auto& f = family_at(spec, i);
    check_row_length(f, N);
    alphabet.push_back(static_cast<Letter>(i));
    traces.push_back(from_rational<T>(Rational(f.lambda / N)));
    alphas.push_back(from_rational<T>(f.alpha));
  }
  auto eval = [traces, alphas](std::span<const Letter> word) -> T {
    const Letter first = word.front();
    if (!std::all_of(word.begin(), word.end(), [first](Letter l) { return l == first; })) return T(0);
    const auto i = static_cast<std::size_t>(first);
    return ipow(alphas[i], static_cast<unsigned>(word.size())) * traces[i];
  };
  return WordMomentOracle<T>(std::move(alphabet), order, std::move(eval));
}

template <Scalar T>
T joint_mixed_cumulant(const TriangularArraySpec& spec, const Word& families, std::int64_t N, int max_order) {
  if (families.empty()) throw DomainError("joint_mixed_cumulant: empty word");
  const auto oracle = orthogonal_cell_oracle<T>(spec, N, static_cast<int>(families.size()));
  return from_rational<T>(Rational(N)) * multivariate_cumulant(oracle, families, max_order);
}

#define FREEPROB_INSTANTIATE(T)                                                                                    \
  template MomentSequence<T> row_cell_moments<T>(const TriangularArraySpec&, std::size_t, std::int64_t, int);     \
  template CumulantSequence<T> row_sum_cumulants<T>(const TriangularArraySpec&, std::size_t, std::int64_t, int,   \
                                                    int);                                                          \
  template std::vector<ConvergenceRow<T>> convergence_table<T>(const TriangularArraySpec&, std::size_t,           \
                                                               std::span<const std::int64_t>, int, int);          \
  template WordMomentOracle<T> orthogonal_cell_oracle<T>(const TriangularArraySpec&, std::int64_t, int);          \
  template T joint_mixed_cumulant<T>(const TriangularArraySpec&, const Word&, std::int64_t, int);

FREEPROB_INSTANTIATE(Rational)
FREEPROB_INSTANTIATE(double)

#undef FREEPROB_INSTANTIATE

}  // namespace freeprob
