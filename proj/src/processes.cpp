#include "freeprob/processes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "freeprob/error.hpp"
#include "freeprob/quadrature.hpp"

namespace freeprob {
namespace {

int rate_of(const ProcessSpec& p) {
  return std::visit([](const auto& q) { return q.rate; }, p);
}

JumpLaw jump_of(const ProcessSpec& p) {
  if (const auto* fp = std::get_if<FreePoissonProcess>(&p)) return AtomicMeasure::point_mass(fp->alpha);
  return std::get<CompoundFreePoissonProcess>(p).jump;
}

}  // namespace

void validate(const ProcessSpec& p) {
  if (rate_of(p) < 1) throw DomainError("process rate must be a positive integer");
}

template <Scalar T>
CumulantSequence<T> increment_cumulants(const ProcessSpec& p, const T& s, const T& t, int order) {
  validate(p);
  if (s < T(0) || !(s < t)) throw DomainError("increment requires 0 <= s < t");
  if (order < 1) throw DomainError("order must be positive");
  const T scale = T(rate_of(p)) * (t - s);
  const JumpLaw jump = jump_of(p);
  if (order > jump_order_limit(jump)) {
    throw DomainError("order " + std::to_string(order) + " exceeds the jump-law truncation");
  }
  std::vector<T> kappa;
  kappa.reserve(static_cast<std::size_t>(order));
  for (int n = 1; n <= order; ++n) kappa.push_back(scale * jump_moment<T>(jump, n));
  return CumulantSequence<T>(std::move(kappa));
}

CompoundFreePoissonProcess sum_processes(const std::vector<ProcessSpec>& processes) {
  if (processes.empty()) throw DomainError("sum_processes: empty list");
  int total_rate = 0;
  std::vector<JumpLaw> jumps;
  std::vector<Rational> weights;
  bool all_atomic = true;
  int moment_order = jump_order_limit(jump_of(processes.front()));
  for (const auto& p : processes) {
    validate(p);
    total_rate += rate_of(p);
    weights.emplace_back(rate_of(p));
    jumps.push_back(jump_of(p));
    all_atomic = all_atomic && std::holds_alternative<AtomicMeasure>(jumps.back());
    moment_order = std::min(moment_order, jump_order_limit(jumps.back()));
  }
  if (all_atomic) {
    std::vector<AtomicMeasure> measures;
    for (const auto& j : jumps) measures.push_back(std::get<AtomicMeasure>(j));
    return {total_rate, AtomicMeasure::mixture(measures, weights)};
  }
  std::vector<Rational> mixed(static_cast<std::size_t>(moment_order), Rational(0));
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    for (int n = 1; n <= moment_order; ++n) {
      mixed[n - 1] += weights[i] * jump_moment<Rational>(jumps[i], n) / total_rate;
    }
  }
  return {total_rate, MomentSequence<Rational>(std::move(mixed))};
}

template <Scalar T>
T covariance_kernel(const ProcessSpec& p, const T& s, const T& t) {
  validate(p);
  const auto* fp = std::get_if<FreePoissonProcess>(&p);
  if (fp == nullptr) throw DomainError("covariance_kernel is defined for free Poisson processes");
  if (s < T(0) || t < T(0)) throw DomainError("covariance_kernel requires s, t >= 0");
  const T alpha = from_rational<T>(fp->alpha);
  return T(fp->rate) * std::min(s, t) * alpha * alpha;
}

KLEigenSystem::KLEigenSystem(double alpha, double horizon, int count)
    : alpha_(alpha), horizon_(horizon), count_(count) {
  if (!(horizon > 0.0)) throw DomainError("KL horizon T must be positive");
  if (count < 1) throw DomainError("KL eigenpair count must be positive");
}

double KLEigenSystem::eigenvalue(int n) const {
  const double shifted = (n - 0.5) * std::numbers::pi;
  return alpha_ * alpha_ * horizon_ * horizon_ / (shifted * shifted);
}

double KLEigenSystem::eigenfunction(int n, double t) const {
  return std::sqrt(2.0 / horizon_) * std::sin((n - 0.5) * std::numbers::pi * t / horizon_);
}

std::vector<double> KLEigenSystem::eigenvalues() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count_));
  for (int n = 1; n <= count_; ++n) out.push_back(eigenvalue(n));
  return out;
}

double KLEigenSystem::kernel(double s, double t) const { return alpha_ * alpha_ * std::min(s, t); }

KLEigenSystem kl_eigensystem(double alpha, double horizon, int count) { return {alpha, horizon, count}; }

double mercer_truncation_error(const KLEigenSystem& sys, int N, int grid) {
  if (N < 0 || N > sys.count()) throw DomainError("Mercer truncation N must lie in [0, count]");
  if (grid < 2) throw DomainError("Mercer grid needs at least 2 points per axis");
  const double step = sys.horizon() / (grid - 1);
  std::vector<double> nodes(static_cast<std::size_t>(grid));
  for (int a = 0; a < grid; ++a) nodes[a] = a * step;
  nodes.back() = sys.horizon();

  // phi[a * N + i] = phi_{i+1}(nodes[a])
  std::vector<double> phi(static_cast<std::size_t>(grid) * static_cast<std::size_t>(N));
  for (int a = 0; a < grid; ++a) {
    for (int i = 0; i < N; ++i) phi[static_cast<std::size_t>(a) * N + i] = sys.eigenfunction(i + 1, nodes[a]);
  }
  const auto lambdas = sys.eigenvalues();
  double worst = 0.0;
  for (int a = 0; a < grid; ++a) {
    for (int b = a; b < grid; ++b) {
      double partial = 0.0;
      for (int i = 0; i < N; ++i) {
        partial += lambdas[i] * phi[static_cast<std::size_t>(a) * N + i] * phi[static_cast<std::size_t>(b) * N + i];
      }
      worst = std::max(worst, std::abs(sys.kernel(nodes[a], nodes[b]) - partial));
    }
  }
  return worst;
}

double eigenfunction_inner_product(const KLEigenSystem& sys, int i, int j, int points) {
  return simpson([&](double t) { return sys.eigenfunction(i, t) * sys.eigenfunction(j, t); }, 0.0, sys.horizon(),
                 points);
}

double kernel_apply(const KLEigenSystem& sys, int n, double t, int points) {
  const double a2 = sys.alpha() * sys.alpha();
  const double below = simpson([&](double s) { return s * sys.eigenfunction(n, s); }, 0.0, t, points);
  const double above = simpson([&](double s) { return sys.eigenfunction(n, s); }, t, sys.horizon(), points);
  return a2 * (below + t * above);
}

double eigenrelation_residual(const KLEigenSystem& sys, int n, int grid, int points) {
  if (grid < 2) throw DomainError("eigenrelation grid needs at least 2 points");
  double worst = 0.0;
  for (int a = 0; a < grid; ++a) {
    const double t = sys.horizon() * a / (grid - 1);
    worst = std::max(worst, std::abs(kernel_apply(sys, n, t, points) - sys.eigenvalue(n) * sys.eigenfunction(n, t)));
  }
  return worst;
}

double kl_coefficient_covariance(const KLEigenSystem& sys, int i, int j, int quad_points) {
  if (i < 1 || j < 1 || i > sys.count() || j > sys.count()) {
    throw DomainError("KL coefficient index outside 1..count");
  }
  return simpson([&](double t) { return kernel_apply(sys, i, t, quad_points) * sys.eigenfunction(j, t); }, 0.0,
                 sys.horizon(), quad_points);
}

template CumulantSequence<Rational> increment_cumulants(const ProcessSpec&, const Rational&, const Rational&, int);
template CumulantSequence<double> increment_cumulants(const ProcessSpec&, const double&, const double&, int);
template Rational covariance_kernel(const ProcessSpec&, const Rational&, const Rational&);
template double covariance_kernel(const ProcessSpec&, const double&, const double&);

}  // namespace freeprob
