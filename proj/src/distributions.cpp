#include "freeprob/distributions.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "freeprob/error.hpp"

namespace freeprob {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void require_order(int order) {
  if (order < 1) throw DomainError("order must be positive, got " + std::to_string(order));
}

}  // namespace

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw DomainError("atomic measure has no atoms");
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
  Rational total = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].weight <= 0) throw DomainError("atomic measure weights must be positive");
    if (i > 0 && atoms_[i].location == atoms_[i - 1].location) {
      throw DomainError("atomic measure locations must be distinct");
    }
    total += atoms_[i].weight;
  }
  if (std::abs(to_double(total) - 1.0) > kWeightTolerance) {
    throw DomainError("atomic measure weights sum to " + to_string(total) + ", expected 1");
  }
}

AtomicMeasure AtomicMeasure::point_mass(const Rational& location) { return AtomicMeasure({{location, 1}}); }

AtomicMeasure AtomicMeasure::mixture(const std::vector<AtomicMeasure>& measures, const std::vector<Rational>& weights) {
  if (measures.empty() || measures.size() != weights.size()) {
    throw DomainError("mixture needs one weight per measure");
  }
  Rational total = 0;
  for (const auto& w : weights) {
    if (w <= 0) throw DomainError("mixture weights must be positive");
    total += w;
  }
  std::vector<Atom> merged;
  for (std::size_t i = 0; i < measures.size(); ++i) {
    for (const auto& a : measures[i].atoms()) {
      const Rational w = a.weight * weights[i] / total;
      auto it = std::find_if(merged.begin(), merged.end(), [&](const Atom& m) { return m.location == a.location; });
      if (it == merged.end()) {
        merged.push_back({a.location, w});
      } else {
        it->weight += w;
      }
    }
  }
  return AtomicMeasure(std::move(merged));
}

template <Scalar T>
T jump_moment(const JumpLaw& jump, int n) {
  return std::visit(Overloaded{
                        [n](const AtomicMeasure& nu) { return nu.template moment<T>(n); },
                        [n](const MomentSequence<Rational>& m) {
                          if (n > m.order()) {
                            throw DomainError("jump moments known only up to order " + std::to_string(m.order()));
                          }
                          return from_rational<T>(m[n]);
                        },
                    },
                    jump);
}

int jump_order_limit(const JumpLaw& jump) {
  if (const auto* m = std::get_if<MomentSequence<Rational>>(&jump)) return m->order();
  return std::numeric_limits<int>::max();
}

void validate(const DistributionSpec& spec) {
  std::visit(Overloaded{
                 [](const FreePoisson& d) {
                   if (d.lambda < 0) throw DomainError("free Poisson rate lambda must be non-negative");
                 },
                 [](const CompoundFreePoisson& d) {
                   if (d.lambda < 0) throw DomainError("compound free Poisson rate lambda must be non-negative");
                 },
                 [](const Semicircle& d) {
                   if (d.radius <= 0) throw DomainError("semicircle radius must be positive");
                 },
                 [](const FreeBernoulli& d) {
                   if (d.p < 0 || d.p > 1) throw DomainError("free Bernoulli p must lie in [0, 1]");
                 },
                 [](const PointMass&) {},
             },
             spec);
}

template <Scalar T>
CumulantSequence<T> cumulant_sequence(const DistributionSpec& spec, int order, int max_order) {
  require_order(order);
  validate(spec);
  std::vector<T> kappa(static_cast<std::size_t>(order), T(0));
  std::visit(Overloaded{
                 [&](const FreePoisson& d) {
                   const T lambda = from_rational<T>(d.lambda);
                   const T alpha = from_rational<T>(d.alpha);
                   for (int n = 1; n <= order; ++n) kappa[n - 1] = lambda * ipow(alpha, n);
                 },
                 [&](const CompoundFreePoisson& d) {
                   if (order > jump_order_limit(d.jump)) {
                     throw DomainError("order " + std::to_string(order) + " exceeds the jump-law truncation " +
                                       std::to_string(jump_order_limit(d.jump)));
                   }
                   const T lambda = from_rational<T>(d.lambda);
                   for (int n = 1; n <= order; ++n) kappa[n - 1] = lambda * jump_moment<T>(d.jump, n);
                 },
                 [&](const Semicircle& d) {
                   if (order >= 2) kappa[1] = from_rational<T>(Rational(d.radius * d.radius / 4));
                 },
                 [&](const FreeBernoulli& d) {
                   const T alpha = from_rational<T>(d.alpha);
                   const T beta = from_rational<T>(d.beta);
                   const T p = from_rational<T>(d.p);
                   std::vector<T> m;
                   for (int n = 1; n <= order; ++n) m.push_back(ipow(alpha, n) * p + ipow(beta, n) * (T(1) - p));
                   const auto k = moments_to_cumulants(MomentSequence<T>(std::move(m)), max_order);
                   kappa.assign(k.values().begin(), k.values().end());
                 },
                 [&](const PointMass& d) { kappa[0] = from_rational<T>(d.c); },
             },
             spec);
  return CumulantSequence<T>(std::move(kappa));
}

template <Scalar T>
MomentSequence<T> moment_sequence(const DistributionSpec& spec, int order, int max_order) {
  return cumulants_to_moments(cumulant_sequence<T>(spec, order, max_order), max_order);
}

template <Scalar T>
std::optional<FreePoissonFit<T>> classify_free_poisson(const CumulantSequence<T>& kappa, const T& tol) {
  if (kappa.order() < 3) {
    throw DomainError("classify_free_poisson: insufficient data, need order >= 3, got " +
                      std::to_string(kappa.order()));
  }
  if (tol <= T(0)) throw DomainError("classify_free_poisson: tolerance must be positive");
  const auto values = kappa.values();
  if (std::all_of(values.begin(), values.end(), [&](const T& k) { return abs_value(k) <= tol; })) {
    return FreePoissonFit<T>{T(0), T(0)};
  }
  // A free Poisson law with lambda > 0 and alpha != 0 has kappa_1 != 0.
  if (abs_value(kappa[1]) <= tol) return std::nullopt;
  const T alpha = kappa[2] / kappa[1];
  if (abs_value(alpha) <= tol) return std::nullopt;
  const T lambda = kappa[1] / alpha;
  if (lambda < T(0)) return std::nullopt;
  for (int n = 1; n <= kappa.order(); ++n) {
    const T scale = std::max(T(1), abs_value(kappa[n]));
    if (abs_value(T(kappa[n] - lambda * ipow(alpha, n))) > tol * scale) return std::nullopt;
  }
  return FreePoissonFit<T>{lambda, alpha};
}

#define FREEPROB_INSTANTIATE(T)                                                              \
  template T jump_moment<T>(const JumpLaw&, int);                                            \
  template CumulantSequence<T> cumulant_sequence<T>(const DistributionSpec&, int, int);      \
  template MomentSequence<T> moment_sequence<T>(const DistributionSpec&, int, int);          \
  template std::optional<FreePoissonFit<T>> classify_free_poisson(const CumulantSequence<T>&, const T&);

FREEPROB_INSTANTIATE(Rational)
FREEPROB_INSTANTIATE(double)

#undef FREEPROB_INSTANTIATE

}  // namespace freeprob
