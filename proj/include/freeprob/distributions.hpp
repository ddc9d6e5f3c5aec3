#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "freeprob/cumulants.hpp"
#include "freeprob/scalar.hpp"

namespace freeprob {

struct Atom {
  Rational location;
  Rational weight;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finitely supported probability measure, atoms sorted by location.
class AtomicMeasure {
 public:
  /// Weights must be positive and sum to 1 within kWeightTolerance;
  /// locations must be distinct.
  explicit AtomicMeasure(std::vector<Atom> atoms);

  static AtomicMeasure point_mass(const Rational& location);

  /// sum_i weights[i] * measures[i], merging coincident atoms.  The weights
  /// are normalised to sum to 1.
  static AtomicMeasure mixture(const std::vector<AtomicMeasure>& measures, const std::vector<Rational>& weights);

  const std::vector<Atom>& atoms() const { return atoms_; }

  template <Scalar T>
  T moment(int n) const {
    T sum(0);
    for (const auto& a : atoms_) sum += from_rational<T>(a.weight) * ipow(from_rational<T>(a.location), n);
    return sum;
  }

  friend bool operator==(const AtomicMeasure&, const AtomicMeasure&) = default;

  static constexpr double kWeightTolerance = 1e-9;

 private:
  std::vector<Atom> atoms_;
};

/// Jump distribution of a compound free Poisson law: explicit atoms, or just
/// its moments m_1..m_N (which caps the usable cumulant order at N).
using JumpLaw = std::variant<AtomicMeasure, MomentSequence<Rational>>;

/// n-th moment of the jump law; DomainError beyond a moment truncation.
template <Scalar T>
T jump_moment(const JumpLaw& jump, int n);

/// Highest order the jump law supports (unbounded for atoms).
int jump_order_limit(const JumpLaw& jump);

struct FreePoisson {
  Rational lambda;
  Rational alpha;
};
struct CompoundFreePoisson {
  Rational lambda;
  JumpLaw jump;
};
struct Semicircle {
  Rational radius;
};
/// a = alpha p + beta (1 - p) with p a projection of trace `p`.
struct FreeBernoulli {
  Rational alpha;
  Rational beta;
  Rational p;
};
struct PointMass {
  Rational c;
};

using DistributionSpec = std::variant<FreePoisson, CompoundFreePoisson, Semicircle, FreeBernoulli, PointMass>;

/// Throws DomainError when a parameter is outside its domain.
void validate(const DistributionSpec& spec);

template <Scalar T>
CumulantSequence<T> cumulant_sequence(const DistributionSpec& spec, int order, int max_order = kDefaultMaxOrder);

template <Scalar T>
MomentSequence<T> moment_sequence(const DistributionSpec& spec, int order, int max_order = kDefaultMaxOrder);

template <Scalar T>
struct FreePoissonFit {
  T lambda;
  T alpha;
};

inline constexpr double kDefaultClassifyTolerance = 1e-9;

/// Fits (lambda, alpha) from kappa_1 and kappa_2 and accepts when every
/// |kappa_n - lambda alpha^n| <= tol * max(1, |kappa_n|).  An all-zero
/// sequence is FreePoisson(0, 0).  Needs order >= 3.
template <Scalar T>
std::optional<FreePoissonFit<T>> classify_free_poisson(const CumulantSequence<T>& kappa,
                                                       const T& tol = from_double<T>(kDefaultClassifyTolerance));

}  // namespace freeprob
