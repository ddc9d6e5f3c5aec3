#include <doctest.h>

#include <cmath>

#include "freeprob/error.hpp"
#include "freeprob/integration.hpp"
#include "oracles.hpp"

using namespace freeprob;
using Q = Rational;

namespace {

StepFunction<Q> step(std::vector<std::tuple<Q, Q, Q>> pieces) {
  std::vector<StepPiece<Q>> out;
  for (auto& [lo, hi, c] : pieces) out.push_back({Interval<Q>(lo, hi), c});
  return StepFunction<Q>(std::move(out));
}

StepFunction<Q> example_s() { return step({{0, 1, 2}, {1, 3, -1}}); }

PiecewisePoly<Q> poly(std::vector<std::tuple<Q, Q, std::vector<Q>>> pieces) {
  std::vector<PolyPiece<Q>> out;
  for (auto& [lo, hi, c] : pieces) out.push_back({Interval<Q>(lo, hi), c});
  return PiecewisePoly<Q>(std::move(out));
}

CumulantSequence<Q> cumulants(std::vector<Q> v) { return CumulantSequence<Q>(std::move(v)); }

// Random step function with disjoint pieces on a rational grid.
StepFunction<Q> random_step(oracle::RationalGen& gen) {
  std::vector<StepPiece<Q>> pieces;
  Q x = gen.next(4, 3);
  const int count = gen.integer(1, 5);
  for (int i = 0; i < count; ++i) {
    const Q lo = x + Q(gen.integer(0, 2), 2);
    const Q hi = lo + gen.positive(5, 4);
    pieces.push_back({Interval<Q>(lo, hi), gen.next()});
    x = hi;
  }
  return StepFunction<Q>(std::move(pieces));
}

// Brute-force kappa_m: sum over the raw pieces, no canonical form needed once disjoint.
Q brute_kappa(const StepFunction<Q>& s, int m) {
  Q total = 0;
  for (const auto& p : s.pieces()) total += ipow(p.coefficient, static_cast<unsigned>(m)) * p.interval.length();
  return total;
}

}  // namespace

TEST_CASE("intervals and canonical step functions") {
  CHECK_THROWS_AS(Interval<Q>(1, 1), DomainError);
  CHECK_THROWS_AS(Interval<Q>(2, 1), DomainError);
  const auto s = step({{0, 1, 1}, {1, 2, 1}, {5, 6, 0}});
  REQUIRE(s.pieces().size() == 1);
  CHECK(s.pieces()[0].interval == Interval<Q>(0, 2));
  const auto overlap = step({{0, 2, 1}, {1, 3, 2}});
  CHECK(overlap == step({{0, 1, 1}, {1, 2, 3}, {2, 3, 2}}));
  CHECK(overlap(Q(3, 2)) == 3);
  CHECK(overlap(Q(3)) == 0);
  CHECK(step({{0, 1, 1}, {0, 1, -1}}).is_zero());
  CHECK((example_s() + example_s().scaled(-1)).is_zero());
}

TEST_CASE("integrate_step examples") {
  CHECK(integrate_step(example_s(), 3) == cumulants({0, 6, 6}));
  const Q lambda(7, 3);
  CHECK(integrate_step(step({{0, lambda, 1}}), 5) == cumulants({lambda, lambda, lambda, lambda, lambda}));
  CHECK(integrate_step(StepFunction<Q>{}, 3) == cumulants({0, 0, 0}));
}

TEST_CASE("l2_moment_bound examples") {
  const auto b = l2_moment_bound(example_s());
  CHECK(b.lhs == 6);
  CHECK(b.rhs == 22);
  const auto one = l2_moment_bound(step({{0, 1, 1}}));
  CHECK(one.lhs == 2);
  CHECK(one.rhs == 2);
  const auto zero = l2_moment_bound(StepFunction<Q>{});
  CHECK(zero.lhs == 0);
  CHECK(zero.rhs == 0);
}

TEST_CASE("centered integrals and norms") {
  CHECK(centered_integrate_step(step({{0, 2, 1}}), 3) == cumulants({0, 2, 2}));
  CHECK(centered_integrate_step(example_s(), 1) == cumulants({0}));
  CHECK(centered_integrate_step(example_s(), 2) == cumulants({0, 6}));
  CHECK(centered_l2_norm(example_s()) == doctest::Approx(std::sqrt(6.0)));
  CHECK(centered_l2_norm(StepFunction<Q>{}) == 0.0);
  CHECK(centered_l2_norm(step({{1, Q(7, 2), 1}})) == doctest::Approx(std::sqrt(2.5)));
  CHECK(centered_l1_bound(step({{0, 1, 1}})) == 2);
  CHECK(centered_l1_bound(StepFunction<Q>{}) == 0);
  CHECK(centered_l1_bound(example_s()) == 8);
}

TEST_CASE("properties on random rational step functions") {
  oracle::RationalGen gen(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_step(gen);
    const auto k = integrate_step(s, 8);
    for (int m = 1; m <= 8; ++m) CHECK(k[m] == brute_kappa(s, m));

    const auto b = l2_moment_bound(s);
    CHECK(b.lhs <= b.rhs);
    bool single_signed = true;
    for (const auto& p : s.pieces()) single_signed = single_signed && (p.coefficient > 0) == (s.pieces()[0].coefficient > 0);
    if (single_signed) CHECK(b.lhs == b.rhs);
    if (!single_signed) CHECK(b.lhs < b.rhs);

    CHECK(centered_l2_norm_squared(s) == centered_integrate_step(s, 2)[2]);
    CHECK(centered_l2_norm_squared(s) == l2_norm_squared(s));

    // Split every piece at a random interior point: the integral is unchanged.
    std::vector<StepPiece<Q>> split;
    for (const auto& p : s.pieces()) {
      const Q t = p.interval.lo + p.interval.length() * Q(gen.integer(1, 9), 10);
      split.push_back({Interval<Q>(p.interval.lo, t), p.coefficient});
      split.push_back({Interval<Q>(t, p.interval.hi), p.coefficient});
    }
    CHECK(integrate_step(StepFunction<Q>(split), 8) == k);

    const Q c = gen.next();
    const auto scaled = integrate_step(s.scaled(c), 8);
    for (int m = 1; m <= 8; ++m) CHECK(scaled[m] == ipow(c, static_cast<unsigned>(m)) * k[m]);
  }
}

TEST_CASE("free additivity across disjoint supports and first-order linearity") {
  oracle::RationalGen gen(78);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = random_step(gen);
    std::vector<StepPiece<Q>> shifted;
    const auto raw = random_step(gen);
    for (const auto& p : raw.pieces()) {
      shifted.push_back({Interval<Q>(p.interval.lo + 100, p.interval.hi + 100), p.coefficient});
    }
    const StepFunction<Q> r(shifted);
    const auto sum = integrate_step(s + r, 6);
    const auto ks = integrate_step(s, 6);
    const auto kr = integrate_step(r, 6);
    for (int m = 1; m <= 6; ++m) CHECK(sum[m] == ks[m] + kr[m]);
    const Q a = gen.next();
    const Q b = gen.next();
    CHECK(integrate_step(s.scaled(a) + r.scaled(b), 1)[1] == a * ks[1] + b * kr[1]);
  }
}

TEST_CASE("approximate") {
  const auto chi = PiecewisePoly<double>::from_step(to_floating(step({{0, 1, 1}})));
  CHECK(approximate(chi, 0.25) == to_floating(step({{0, 1, 1}})));
  const auto x = to_floating(poly({{0, 1, {0, 1}}}));
  for (int n : {4, 16, 256}) {
    const auto s = approximate(x, 1.0 / n);
    CHECK(integral(s) == doctest::Approx(0.5 - 0.5 / n));
    for (double t = 0.0; t < 1.0; t += 0.01) {
      CHECK(s(t) >= 0.0);
      CHECK(s(t) <= t + 1e-15);
    }
  }
  const auto x2 = to_floating(poly({{0, 1, {0, 0, 1}}}));
  CHECK(std::abs(l2_norm_squared(approximate(x2, 0.01)) - 0.2) <= 0.03);
  // Sign changes inside a cell give zero; negative cells use the supremum.
  const auto line = to_floating(poly({{-1, 1, {0, 1}}}));
  const auto s = approximate(line, 0.5);
  CHECK(s(-0.9) == doctest::Approx(-0.5));
  CHECK(s(0.9) == doctest::Approx(0.5));
  for (double t = -1.0; t < 1.0; t += 0.01) {
    CHECK(std::abs(s(t)) <= std::abs(t) + 1e-15);
    CHECK(s(t) * t >= 0.0);
  }
  // Interior extremum found by the root solver.
  const auto bump = to_floating(poly({{0, 1, {0, 4, -4}}}));
  CHECK(approximate(bump, 1.0)(0.5) == doctest::Approx(0.0));
  CHECK(approximate(bump, 0.5)(0.25) == doctest::Approx(0.0));
  const auto neg_bump = to_floating(poly({{0, 1, {-1, 4, -4}}}));
  CHECK(approximate(neg_bump, 1.0)(0.5) == doctest::Approx(0.0));
  CHECK(approximate(to_floating(poly({{0, 1, {-2, 4, -4}}})), 1.0)(0.5) == doctest::Approx(-1.0));
  CHECK(approximate(PiecewisePoly<double>{}, 0.1).is_zero());
  CHECK_THROWS_AS(approximate(x, 0.0), DomainError);
}

TEST_CASE("power integrals and integral_cumulants") {
  CHECK(power_integrals(PiecewisePoly<Q>::from_step(step({{0, 1, 1}})), 5) == cumulants({1, 1, 1, 1, 1}));
  const auto x = poly({{0, 1, {0, 1}}});
  std::vector<Q> expected;
  for (int m = 1; m <= 6; ++m) expected.push_back(Q(1, m + 1));
  CHECK(power_integrals(x, 6) == cumulants(expected));
  CHECK(integral_cumulants(x, 6, 1e-6) == cumulants(expected));
  const auto pm = PiecewisePoly<Q>::from_step(step({{0, 1, 1}, {2, 3, -1}}));
  CHECK(integral_cumulants(pm, 4, 1e-5) == cumulants({0, 2, 0, 2}));
  CHECK_THROWS_AS(integral_cumulants(pm, 4, 1e-9), RefinementFailure);
  const auto fl = integral_cumulants(to_floating(x), 6, 1e-6);
  for (int m = 1; m <= 6; ++m) CHECK(fl[m] == doctest::Approx(1.0 / (m + 1)).epsilon(1e-12));
  CHECK_THROWS_AS(integral_cumulants(x, 3, 1e-12, RefinementOptions{16, 1024}), RefinementFailure);
  CHECK_THROWS_AS(integral_cumulants(x, 3, 0.0), DomainError);
}

TEST_CASE("refinement converges to the exact values") {
  const auto x = to_floating(poly({{0, 1, {0, 1}}}));
  const auto steps = refine_step_integrals(x, 6, 5e-7);
  REQUIRE(steps.size() >= 2);
  for (std::size_t i = 1; i < steps.size(); ++i) CHECK(steps[i].mesh == doctest::Approx(steps[i - 1].mesh / 2));
  for (int m = 1; m <= 6; ++m) CHECK(std::abs(steps.back().estimate[m] - 1.0 / (m + 1)) <= 1e-6);
}

TEST_CASE("integral cumulants of a non-negative f form a positive Hankel form") {
  const auto f = poly({{0, 1, {Q(1, 2), 1}}, {2, Q(5, 2), {3, 0, -1}}});
  const auto k = power_integrals(f, 8);
  // kappa_{i+j+2} = int f^2 f^i f^j is a Gram matrix; check leading minors of [k_{i+j+2}] by Gaussian elimination.
  std::vector<std::vector<Q>> h(4, std::vector<Q>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) h[i][j] = k[i + j + 2];
  for (int p = 0; p < 4; ++p) {
    CHECK(h[p][p] > 0);
    for (int r = p + 1; r < 4; ++r) {
      const Q factor = h[r][p] / h[p][p];
      for (int c = p; c < 4; ++c) h[r][c] -= factor * h[p][c];
    }
  }
}

TEST_CASE("norms and truncation tails") {
  const auto chi3 = to_floating(PiecewisePoly<Q>::from_step(step({{0, 3, 1}})));
  const auto t1 = truncation_tail(chi3, 1);
  CHECK(t1.l1 == doctest::Approx(2.0));
  CHECK(t1.l2 == doctest::Approx(std::sqrt(2.0)));
  const auto t3 = truncation_tail(chi3, 3);
  CHECK(t3.l1 == 0.0);
  CHECK(t3.l2 == 0.0);
  const auto unit = to_floating(poly({{0, 1, {0, 1}}}));
  CHECK(truncation_tail(unit, 2).l1 == 0.0);
  CHECK_THROWS_AS(truncation_tail(unit, 0), DomainError);
  const auto line = to_floating(poly({{-1, 1, {0, 1}}}));
  CHECK(integral(line) == doctest::Approx(0.0));
  CHECK(l1_norm(line) == doctest::Approx(1.0));
  CHECK(l2_norm(line) == doctest::Approx(std::sqrt(2.0 / 3.0)));
}
