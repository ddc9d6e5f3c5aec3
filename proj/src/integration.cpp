#include "freeprob/integration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <unsupported/Eigen/Polynomials>

#include "freeprob/error.hpp"

namespace freeprob {
namespace {

template <Scalar T>
void trim(std::vector<T>& coeffs) {
  while (!coeffs.empty() && coeffs.back() == T(0)) coeffs.pop_back();
}

template <Scalar T>
T poly_eval(const std::vector<T>& coeffs, const T& x) {
  T value(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) value = value * x + *it;
  return value;
}

template <Scalar T>
std::vector<T> poly_mul(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<T> out(a.size() + b.size() - 1, T(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

template <Scalar T>
std::vector<T> poly_add(std::vector<T> a, const std::vector<T>& b) {
  if (a.size() < b.size()) a.resize(b.size(), T(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  trim(a);
  return a;
}

// int_lo^hi p(x) dx
template <Scalar T>
T poly_integral(const std::vector<T>& coeffs, const T& lo, const T& hi) {
  T sum(0);
  T lo_pow = lo;
  T hi_pow = hi;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    sum += coeffs[k] * (hi_pow - lo_pow) / T(static_cast<long>(k + 1));
    lo_pow *= lo;
    hi_pow *= hi;
  }
  return sum;
}

std::vector<double> derivative(const std::vector<double>& coeffs) {
  std::vector<double> out;
  for (std::size_t k = 1; k < coeffs.size(); ++k) out.push_back(coeffs[k] * static_cast<double>(k));
  return out;
}

// Real roots of the polynomial strictly inside (lo, hi), ascending.
std::vector<double> real_roots_in(std::vector<double> coeffs, double lo, double hi) {
  trim(coeffs);
  std::vector<double> roots;
  if (coeffs.size() == 2) {
    roots.push_back(-coeffs[0] / coeffs[1]);
  } else if (coeffs.size() > 2) {
    Eigen::VectorXd poly = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(poly);
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    for (const auto& z : solver.roots()) {
      if (std::abs(z.imag()) <= 1e-10 * scale) roots.push_back(z.real());
    }
  }
  std::erase_if(roots, [&](double r) { return !(r > lo && r < hi); });
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Breakpoint sweep: sums the values of overlapping items on every elementary
// segment, drops zero segments and merges touching segments with equal values.
template <Scalar T, class Value, class Add, class IsZero>
std::vector<std::pair<Interval<T>, Value>> canonical_segments(std::vector<std::pair<Interval<T>, Value>> items,
                                                             Add add, IsZero is_zero) {
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first.lo < b.first.lo; });
  bool disjoint = true;
  for (std::size_t i = 1; i < items.size() && disjoint; ++i) disjoint = !(items[i].first.lo < items[i - 1].first.hi);

  std::vector<std::pair<Interval<T>, Value>> segments;
  if (disjoint) {
    segments = std::move(items);
  } else {
    std::vector<T> cuts;
    for (const auto& [iv, v] : items) {
      cuts.push_back(iv.lo);
      cuts.push_back(iv.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::size_t next = 0;
    std::vector<std::size_t> active;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const T& a = cuts[c];
      const T& b = cuts[c + 1];
      std::erase_if(active, [&](std::size_t i) { return !(a < items[i].first.hi); });
      while (next < items.size() && !(a < items[next].first.lo)) active.push_back(next++);
      if (active.empty()) continue;
      std::sort(active.begin(), active.end());
      Value sum = items[active.front()].second;
      for (std::size_t k = 1; k < active.size(); ++k) sum = add(sum, items[active[k]].second);
      segments.emplace_back(Interval<T>(a, b), std::move(sum));
    }
  }

  std::vector<std::pair<Interval<T>, Value>> out;
  for (auto& seg : segments) {
    if (is_zero(seg.second)) continue;
    if (!out.empty() && out.back().first.hi == seg.first.lo && out.back().second == seg.second) {
      out.back().first.hi = seg.first.hi;
    } else {
      out.push_back(std::move(seg));
    }
  }
  return out;
}

template <Scalar T>
CumulantSequence<T> zeros(int order) {
  return CumulantSequence<T>(std::vector<T>(static_cast<std::size_t>(order), T(0)));
}

void require_order(int order) {
  if (order < 1) throw DomainError("order must be positive, got " + std::to_string(order));
}

struct Extremes {
  double lo;
  double hi;
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

}  // namespace

template <Scalar T>
Interval<T>::Interval(T lo_, T hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (!(lo < hi)) throw DomainError("interval requires lo < hi");
}

template <Scalar T>
StepFunction<T>::StepFunction(std::vector<StepPiece<T>> pieces) {
  std::vector<std::pair<Interval<T>, T>> items;
  items.reserve(pieces.size());
  for (auto& p : pieces) items.emplace_back(std::move(p.interval), std::move(p.coefficient));
  auto segments = canonical_segments<T, T>(
      std::move(items), [](const T& a, const T& b) { return T(a + b); }, [](const T& v) { return v == T(0); });
  pieces_.reserve(segments.size());
  for (auto& [iv, c] : segments) pieces_.push_back({std::move(iv), std::move(c)});
}

template <Scalar T>
T StepFunction<T>::operator()(const T& x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](const T& v, const StepPiece<T>& p) { return v < p.interval.lo; });
  if (it == pieces_.begin()) return T(0);
  --it;
  return x < it->interval.hi ? it->coefficient : T(0);
}

template <Scalar T>
StepFunction<T> StepFunction<T>::scaled(const T& c) const {
  auto pieces = pieces_;
  for (auto& p : pieces) p.coefficient *= c;
  return StepFunction(std::move(pieces));
}

template <Scalar T>
T integral(const StepFunction<T>& s) {
  T sum(0);
  for (const auto& p : s.pieces()) sum += p.coefficient * p.interval.length();
  return sum;
}

template <Scalar T>
T l1_norm(const StepFunction<T>& s) {
  T sum(0);
  for (const auto& p : s.pieces()) sum += abs_value(p.coefficient) * p.interval.length();
  return sum;
}

template <Scalar T>
T l2_norm_squared(const StepFunction<T>& s) {
  T sum(0);
  for (const auto& p : s.pieces()) sum += p.coefficient * p.coefficient * p.interval.length();
  return sum;
}

template <Scalar T>
CumulantSequence<T> integrate_step(const StepFunction<T>& s, int order) {
  require_order(order);
  std::vector<T> kappa(static_cast<std::size_t>(order), T(0));
  for (const auto& p : s.pieces()) {
    const T length = p.interval.length();
    T power = p.coefficient;
    for (int m = 1; m <= order; ++m) {
      kappa[m - 1] += power * length;
      power *= p.coefficient;
    }
  }
  return CumulantSequence<T>(std::move(kappa));
}

template <Scalar T>
MomentBound<T> l2_moment_bound(const StepFunction<T>& s) {
  const T mean = integral(s);
  const T l1 = l1_norm(s);
  const T l2sq = l2_norm_squared(s);
  return {mean * mean + l2sq, l1 * l1 + l2sq};
}

template <Scalar T>
CumulantSequence<T> centered_integrate_step(const StepFunction<T>& s, int order) {
  auto kappa = integrate_step(s, order);
  std::vector<T> values(kappa.values().begin(), kappa.values().end());
  values[0] = T(0);
  return CumulantSequence<T>(std::move(values));
}

template <Scalar T>
T centered_l2_norm_squared(const StepFunction<T>& s) {
  return l2_norm_squared(s);
}

double centered_l2_norm(const StepFunction<double>& s) { return std::sqrt(l2_norm_squared(s)); }
double centered_l2_norm(const StepFunction<Rational>& s) { return std::sqrt(to_double(l2_norm_squared(s))); }

template <Scalar T>
T centered_l1_bound(const StepFunction<T>& s) {
  return T(2) * l1_norm(s);
}

template <Scalar T>
PiecewisePoly<T>::PiecewisePoly(std::vector<PolyPiece<T>> pieces) {
  std::vector<std::pair<Interval<T>, std::vector<T>>> items;
  items.reserve(pieces.size());
  for (auto& p : pieces) {
    trim(p.coeffs);
    items.emplace_back(std::move(p.interval), std::move(p.coeffs));
  }
  auto segments = canonical_segments<T, std::vector<T>>(
      std::move(items), [](const std::vector<T>& a, const std::vector<T>& b) { return poly_add(a, b); },
      [](const std::vector<T>& c) { return c.empty(); });
  pieces_.reserve(segments.size());
  for (auto& [iv, c] : segments) pieces_.push_back({std::move(iv), std::move(c)});
}

template <Scalar T>
PiecewisePoly<T> PiecewisePoly<T>::from_step(const StepFunction<T>& s) {
  std::vector<PolyPiece<T>> pieces;
  for (const auto& p : s.pieces()) pieces.push_back({p.interval, {p.coefficient}});
  return PiecewisePoly(std::move(pieces));
}

template <Scalar T>
std::optional<Interval<T>> PiecewisePoly<T>::support_hull() const {
  if (pieces_.empty()) return std::nullopt;
  return Interval<T>(pieces_.front().interval.lo, pieces_.back().interval.hi);
}

template <Scalar T>
T PiecewisePoly<T>::operator()(const T& x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](const T& v, const PolyPiece<T>& p) { return v < p.interval.lo; });
  if (it == pieces_.begin()) return T(0);
  --it;
  return x < it->interval.hi ? poly_eval(it->coeffs, x) : T(0);
}

PiecewisePoly<double> to_floating(const PiecewisePoly<Rational>& f) {
  std::vector<PolyPiece<double>> pieces;
  for (const auto& p : f.pieces()) {
    std::vector<double> coeffs;
    for (const auto& c : p.coeffs) coeffs.push_back(to_double(c));
    pieces.push_back({Interval<double>(to_double(p.interval.lo), to_double(p.interval.hi)), std::move(coeffs)});
  }
  return PiecewisePoly<double>(std::move(pieces));
}

StepFunction<double> to_floating(const StepFunction<Rational>& s) {
  std::vector<StepPiece<double>> pieces;
  for (const auto& p : s.pieces()) {
    pieces.push_back(
        {Interval<double>(to_double(p.interval.lo), to_double(p.interval.hi)), to_double(p.coefficient)});
  }
  return StepFunction<double>(std::move(pieces));
}

StepFunction<double> approximate(const PiecewisePoly<double>& f, double mesh) {
  if (!(mesh > 0.0) || !std::isfinite(mesh)) throw DomainError("approximate: mesh must be positive");
  const auto hull = f.support_hull();
  if (!hull) return {};
  const double a = hull->lo;
  const double b = hull->hi;
  const double cells_real = std::ceil((b - a) / mesh - 1e-9);
  if (cells_real > 1e9) throw ResourceLimitError("approximate: mesh too fine for the support");
  const auto cells = static_cast<long>(std::max(1.0, cells_real));
  const double width = (b - a) / static_cast<double>(cells);

  const auto& pieces = f.pieces();
  std::vector<std::vector<double>> critical;
  critical.reserve(pieces.size());
  for (const auto& p : pieces) critical.push_back(real_roots_in(derivative(p.coeffs), p.interval.lo, p.interval.hi));

  std::vector<StepPiece<double>> out;
  out.reserve(static_cast<std::size_t>(cells));
  std::size_t first = 0;
  for (long k = 0; k < cells; ++k) {
    const double x0 = a + width * static_cast<double>(k);
    const double x1 = k + 1 == cells ? b : a + width * static_cast<double>(k + 1);
    while (first < pieces.size() && !(x0 < pieces[first].interval.hi)) ++first;
    Extremes range{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    double covered_to = x0;
    for (std::size_t j = first; j < pieces.size() && pieces[j].interval.lo < x1; ++j) {
      const auto& p = pieces[j];
      const double lo = std::max(x0, p.interval.lo);
      const double hi = std::min(x1, p.interval.hi);
      if (!(lo < hi)) continue;
      if (covered_to < lo) range.include(0.0);  // gap between pieces
      range.include(poly_eval(p.coeffs, lo));
      range.include(poly_eval(p.coeffs, hi));
      for (double r : critical[j]) {
        if (r > lo && r < hi) range.include(poly_eval(p.coeffs, r));
      }
      covered_to = hi;
    }
    if (covered_to < x1) range.include(0.0);
    double value = 0.0;
    if (range.lo >= 0.0) {
      value = range.lo;
    } else if (range.hi <= 0.0) {
      value = range.hi;
    }
    if (value != 0.0) out.push_back({Interval<double>(x0, x1), value});
  }
  return StepFunction<double>(std::move(out));
}

template <Scalar T>
CumulantSequence<T> power_integrals(const PiecewisePoly<T>& f, int order) {
  require_order(order);
  std::vector<T> kappa(static_cast<std::size_t>(order), T(0));
  for (const auto& p : f.pieces()) {
    std::vector<T> power = p.coeffs;
    for (int m = 1; m <= order; ++m) {
      kappa[m - 1] += poly_integral(power, p.interval.lo, p.interval.hi);
      if (m < order) power = poly_mul(power, p.coeffs);
    }
  }
  return CumulantSequence<T>(std::move(kappa));
}

std::vector<RefinementStep> refine_step_integrals(const PiecewisePoly<double>& f, int order, double tol,
                                                  const RefinementOptions& options) {
  require_order(order);
  if (!(tol > 0.0)) throw DomainError("refinement tolerance must be positive");
  if (options.initial_cells < 1 || options.max_cells < options.initial_cells) {
    throw DomainError("refinement cell budget is inconsistent");
  }
  std::vector<RefinementStep> steps;
  const auto hull = f.support_hull();
  if (!hull) {
    steps.push_back({1.0, zeros<double>(order)});
    return steps;
  }
  const double width = hull->length();
  // Breakpoints at odd fractions of the hull can make two neighbouring
  // estimates coincide by accident, so require two settled doublings in a row.
  int settled_in_a_row = 0;
  for (long cells = options.initial_cells; cells <= options.max_cells; cells *= 2) {
    const double mesh = width / static_cast<double>(cells);
    steps.push_back({mesh, integrate_step(approximate(f, mesh), order)});
    if (steps.size() < 2) continue;
    const auto& prev = steps[steps.size() - 2].estimate;
    const auto& cur = steps.back().estimate;
    bool settled = true;
    for (int m = 1; m <= order && settled; ++m) {
      settled = std::abs(cur[m] - prev[m]) < tol * std::max(1.0, std::abs(cur[m]));
    }
    settled_in_a_row = settled ? settled_in_a_row + 1 : 0;
    if (settled_in_a_row == 2) return steps;
  }
  throw RefinementFailure("step refinement did not settle to tolerance " + std::to_string(tol) + " within " +
                          std::to_string(options.max_cells) + " cells");
}

template <Scalar T>
CumulantSequence<T> integral_cumulants(const PiecewisePoly<T>& f, int order, double tol,
                                       const RefinementOptions& options) {
  auto exact = power_integrals(f, order);
  PiecewisePoly<double> floating;
  if constexpr (std::same_as<T, Rational>) {
    floating = to_floating(f);
  } else {
    floating = f;
  }
  const auto steps = refine_step_integrals(floating, order, tol, options);
  const auto& refined = steps.back().estimate;
  for (int m = 1; m <= order; ++m) {
    const double target = to_double(exact[m]);
    if (std::abs(refined[m] - target) > 8.0 * tol * std::max(1.0, std::abs(target))) {
      throw RefinementFailure("step refinement of order " + std::to_string(m) + " settled at " +
                              std::to_string(refined[m]) + ", exact value is " + std::to_string(target));
    }
  }
  return exact;
}

double integral(const PiecewisePoly<double>& f) {
  double sum = 0.0;
  for (const auto& p : f.pieces()) sum += poly_integral(p.coeffs, p.interval.lo, p.interval.hi);
  return sum;
}

namespace {

double abs_integral(const std::vector<double>& coeffs, double lo, double hi) {
  double sum = 0.0;
  double left = lo;
  auto roots = real_roots_in(coeffs, lo, hi);
  roots.push_back(hi);
  for (double r : roots) {
    sum += std::abs(poly_integral(coeffs, left, r));
    left = r;
  }
  return sum;
}

}  // namespace

double l1_norm(const PiecewisePoly<double>& f) {
  double sum = 0.0;
  for (const auto& p : f.pieces()) sum += abs_integral(p.coeffs, p.interval.lo, p.interval.hi);
  return sum;
}

double l2_norm(const PiecewisePoly<double>& f) {
  double sum = 0.0;
  for (const auto& p : f.pieces()) sum += poly_integral(poly_mul(p.coeffs, p.coeffs), p.interval.lo, p.interval.hi);
  return std::sqrt(sum);
}

TailNorms truncation_tail(const PiecewisePoly<double>& f, int n) {
  if (n < 1) throw DomainError("truncation radius n must be >= 1");
  const double r = n;
  double l1 = 0.0;
  double l2sq = 0.0;
  for (const auto& p : f.pieces()) {
    const std::pair<double, double> parts[] = {{p.interval.lo, std::min(p.interval.hi, -r)},
                                               {std::max(p.interval.lo, r), p.interval.hi}};
    for (const auto& [lo, hi] : parts) {
      if (!(lo < hi)) continue;
      l1 += abs_integral(p.coeffs, lo, hi);
      l2sq += poly_integral(poly_mul(p.coeffs, p.coeffs), lo, hi);
    }
  }
  return {l1, std::sqrt(l2sq)};
}

#define FREEPROB_INSTANTIATE(T)                                                                        \
  template struct Interval<T>;                                                                         \
  template class StepFunction<T>;                                                                      \
  template class PiecewisePoly<T>;                                                                     \
  template T integral(const StepFunction<T>&);                                                         \
  template T l1_norm(const StepFunction<T>&);                                                          \
  template T l2_norm_squared(const StepFunction<T>&);                                                  \
  template CumulantSequence<T> integrate_step(const StepFunction<T>&, int);                           \
  template MomentBound<T> l2_moment_bound(const StepFunction<T>&);                                     \
  template CumulantSequence<T> centered_integrate_step(const StepFunction<T>&, int);                  \
  template T centered_l2_norm_squared(const StepFunction<T>&);                                         \
  template T centered_l1_bound(const StepFunction<T>&);                                                \
  template CumulantSequence<T> power_integrals(const PiecewisePoly<T>&, int);                         \
  template CumulantSequence<T> integral_cumulants(const PiecewisePoly<T>&, int, double, const RefinementOptions&);

FREEPROB_INSTANTIATE(Rational)
FREEPROB_INSTANTIATE(double)

#undef FREEPROB_INSTANTIATE

}  // namespace freeprob
