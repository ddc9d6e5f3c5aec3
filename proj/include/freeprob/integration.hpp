#pragma once

#include <optional>
#include <vector>

#include "freeprob/cumulants.hpp"
#include "freeprob/scalar.hpp"

namespace freeprob {

/// Half-open [lo, hi) with lo < hi.
template <Scalar T>
struct Interval {
  T lo;
  T hi;

  Interval(T lo_, T hi_);
  T length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

template <Scalar T>
struct StepPiece {
  Interval<T> interval;
  T coefficient;
  friend bool operator==(const StepPiece&, const StepPiece&) = default;
};

/// s = sum_i c_i chi_{E_i}.  Construction canonicalizes: overlapping pieces
/// are summed, zero coefficients dropped, touching pieces with equal
/// coefficients merged, pieces sorted by lo.  After that the intervals are
/// disjoint, which the integral formulas rely on.
template <Scalar T>
class StepFunction {
 public:
  StepFunction() = default;
  explicit StepFunction(std::vector<StepPiece<T>> pieces);

  const std::vector<StepPiece<T>>& pieces() const { return pieces_; }
  bool is_zero() const { return pieces_.empty(); }
  T operator()(const T& x) const;

  StepFunction scaled(const T& c) const;
  friend StepFunction operator+(const StepFunction& a, const StepFunction& b) {
    auto pieces = a.pieces_;
    pieces.insert(pieces.end(), b.pieces_.begin(), b.pieces_.end());
    return StepFunction(std::move(pieces));
  }
  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  std::vector<StepPiece<T>> pieces_;
};

template <Scalar T>
T integral(const StepFunction<T>& s);  // int s
template <Scalar T>
T l1_norm(const StepFunction<T>& s);  // int |s|
template <Scalar T>
T l2_norm_squared(const StepFunction<T>& s);  // int s^2

/// kappa_m(X(s)) = sum_i c_i^m |E_i| for m = 1..order.
template <Scalar T>
CumulantSequence<T> integrate_step(const StepFunction<T>& s, int order);

template <Scalar T>
struct MomentBound {
  T lhs;  // phi(X(s)* X(s)) = (int s)^2 + int s^2
  T rhs;  // ||s||_1^2 + ||s||_2^2
};

template <Scalar T>
MomentBound<T> l2_moment_bound(const StepFunction<T>& s);

/// Integral against the centered measure X_E - |E|: kappa_1 = 0, higher
/// cumulants as for integrate_step.
template <Scalar T>
CumulantSequence<T> centered_integrate_step(const StepFunction<T>& s, int order);

/// ||s||_2^2, equal to ||X~(s)||_2^2 by the isometry.
template <Scalar T>
T centered_l2_norm_squared(const StepFunction<T>& s);
double centered_l2_norm(const StepFunction<double>& s);
double centered_l2_norm(const StepFunction<Rational>& s);

/// 2 ||s||_1, an upper bound for ||X~(s)||_1.
template <Scalar T>
T centered_l1_bound(const StepFunction<T>& s);

template <Scalar T>
struct PolyPiece {
  Interval<T> interval;
  std::vector<T> coeffs;  // f(x) = sum_k coeffs[k] x^k on the interval
};

/// Compactly supported, bounded piecewise polynomial.  Overlapping pieces
/// are summed on construction; pieces end up disjoint and sorted.
template <Scalar T>
class PiecewisePoly {
 public:
  PiecewisePoly() = default;
  explicit PiecewisePoly(std::vector<PolyPiece<T>> pieces);

  static PiecewisePoly from_step(const StepFunction<T>& s);

  const std::vector<PolyPiece<T>>& pieces() const { return pieces_; }
  std::optional<Interval<T>> support_hull() const;
  T operator()(const T& x) const;

  friend PiecewisePoly operator-(const PiecewisePoly& f, const PiecewisePoly& g) {
    auto pieces = f.pieces_;
    for (auto p : g.pieces_) {
      for (auto& c : p.coeffs) c = -c;
      pieces.push_back(std::move(p));
    }
    return PiecewisePoly(std::move(pieces));
  }

 private:
  std::vector<PolyPiece<T>> pieces_;
};

PiecewisePoly<double> to_floating(const PiecewisePoly<Rational>& f);
StepFunction<double> to_floating(const StepFunction<Rational>& s);

/// Uniform-mesh step approximation over the support hull.  The hull is cut
/// into ceil(width / mesh) equal cells; on each cell the value is inf f when
/// inf f >= 0, sup f when sup f <= 0, and 0 otherwise.  Hence |s| <= |f|
/// with matching sign, and 0 <= s <= f when f >= 0.
StepFunction<double> approximate(const PiecewisePoly<double>& f, double mesh);

/// int f^m dx for m = 1..order by exact polynomial integration per piece.
template <Scalar T>
CumulantSequence<T> power_integrals(const PiecewisePoly<T>& f, int order);

struct RefinementOptions {
  int initial_cells = 16;
  int max_cells = 1 << 22;
};

struct RefinementStep {
  double mesh;
  CumulantSequence<double> estimate;
};

/// integrate_step(approximate(f, mesh)) for mesh = width / cells, doubling
/// the cell count until successive estimates differ by less than
/// tol * max(1, |value|) in every order, twice in a row.  Throws
/// RefinementFailure when max_cells is reached first.
std::vector<RefinementStep> refine_step_integrals(const PiecewisePoly<double>& f, int order, double tol,
                                                  const RefinementOptions& options = {});

/// kappa_m(X(f)) = int f^m dx, computed exactly and cross-checked against
/// the step-function refinement above.  Throws RefinementFailure when the
/// refinement stalls or lands further than 8 tol from the exact value.
template <Scalar T>
CumulantSequence<T> integral_cumulants(const PiecewisePoly<T>& f, int order, double tol,
                                       const RefinementOptions& options = {});

double integral(const PiecewisePoly<double>& f);
double l1_norm(const PiecewisePoly<double>& f);
double l2_norm(const PiecewisePoly<double>& f);

struct TailNorms {
  double l1;
  double l2;
};

/// ||f - f chi_[-n, n]||_1 and ||.||_2.
TailNorms truncation_tail(const PiecewisePoly<double>& f, int n);

}  // namespace freeprob
