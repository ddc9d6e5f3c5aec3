#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "freeprob/cumulants.hpp"
#include "freeprob/scalar.hpp"

namespace freeprob {

/// One family of the triangular array: cells a_{j,N} = alpha p_{j,N} with
/// phi(p_{j,N}) = lambda / N, the N cells of a row free and identically
/// distributed.
struct ArrayFamily {
  Rational alpha;
  Rational lambda;
};

/// Several families sharing the row index.  With `orthogonal` set, the
/// projections of different families inside one cell are mutually
/// orthogonal (p^(i) p^(k) = 0 for i != k).
struct TriangularArraySpec {
  std::vector<ArrayFamily> families;
  bool orthogonal = false;
};

/// Moments of one cell: alpha^n lambda / N, since p is idempotent.
template <Scalar T>
MomentSequence<T> row_cell_moments(const TriangularArraySpec& spec, std::size_t family, std::int64_t N, int order);

/// Exact cumulants of the row sum S_N = sum_{j<=N} a_{j,N}: N times the
/// cell cumulants, by additivity over the free cells.
template <Scalar T>
CumulantSequence<T> row_sum_cumulants(const TriangularArraySpec& spec, std::size_t family, std::int64_t N, int order,
                                      int max_order = kDefaultMaxOrder);

template <Scalar T>
struct ConvergenceRow {
  std::int64_t N;
  int n;
  T kappa;
  T error;  // |kappa_n(S_N) - lambda alpha^n|
};

/// One row per (N, n) with N in the given order and n = 1..order.
template <Scalar T>
std::vector<ConvergenceRow<T>> convergence_table(const TriangularArraySpec& spec, std::size_t family,
                                                 std::span<const std::int64_t> Ns, int order,
                                                 int max_order = kDefaultMaxOrder);

/// Joint moments of one cell of an orthogonal array: a word whose letters
/// (family indices) are all equal to i gives alpha_i^n lambda_i / N, any
/// other word gives 0.
template <Scalar T>
WordMomentOracle<T> orthogonal_cell_oracle(const TriangularArraySpec& spec, std::int64_t N, int order);

/// Finite-N mixed cumulant kappa_n(S^(w_1), ..., S^(w_n)) of the row sums,
/// i.e. N times the cell cumulant of the word.  Rejects non-orthogonal specs:
/// their joint cell law is not determined by the family parameters.
template <Scalar T>
T joint_mixed_cumulant(const TriangularArraySpec& spec, const Word& families, std::int64_t N,
                       int max_order = kDefaultMaxOrder);

}  // namespace freeprob
