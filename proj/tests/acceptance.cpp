// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "freeprob/cumulants.hpp"
#include "freeprob/distributions.hpp"
#include "freeprob/integration.hpp"
#include "freeprob/limits.hpp"
#include "freeprob/ncpart.hpp"
#include "freeprob/processes.hpp"
#include "freeprob/rmt.hpp"

using namespace freeprob;
using Q = Rational;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0 && elapsed > budget_s) o.require(false, "runtime " + std::to_string(elapsed) + " s over budget");
  if (!o.pass) ++failures;
  std::printf("%s %d %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), elapsed,
              o.detail.empty() ? "" : ": ", o.detail.c_str());
  std::fflush(stdout);
}

Q random_rational(std::mt19937_64& rng, int span, int den) {
  std::uniform_int_distribution<int> p(-span, span);
  std::uniform_int_distribution<int> q(1, den);
  return Q(p(rng), q(rng));
}

StepFunction<Q> random_disjoint_step(std::mt19937_64& rng) {
  const int pieces = std::uniform_int_distribution<int>(1, 6)(rng);
  std::vector<Q> cuts;
  Q x = random_rational(rng, 5, 4);
  for (int i = 0; i <= pieces; ++i) {
    cuts.push_back(x);
    x += Q(std::uniform_int_distribution<int>(1, 9)(rng), std::uniform_int_distribution<int>(1, 7)(rng));
  }
  std::vector<StepPiece<Q>> out;
  for (int i = 0; i < pieces; ++i) out.push_back({Interval<Q>(cuts[i], cuts[i + 1]), random_rational(rng, 9, 5)});
  return StepFunction<Q>(std::move(out));
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

PiecewisePoly<double> poly(std::vector<PolyPiece<double>> pieces) { return PiecewisePoly<double>(std::move(pieces)); }

}  // namespace

int main() {
  const int threads = std::max(1u, std::thread::hardware_concurrency());

  criterion(1, "noncrossing counts and Mobius values", 30, [] {
    Outcome o;
    for (int n = 1; n <= 10; ++n) {
      const auto count = nc::enumerate_noncrossing(n).size();
      o.require(BigInt(count) == nc::catalan(n), "|NC(" + std::to_string(n) + ")|");
    }
    for (int n = 1; n <= 7; ++n) {
      const BigInt expect = (n % 2 == 1 ? 1 : -1) * nc::catalan(n - 1);
      o.require(nc::mobius(nc::SetPartition::singletons(n), nc::SetPartition::single_block(n)) == expect,
                "mu(0_" + std::to_string(n) + ", 1_" + std::to_string(n) + ")");
    }
    return o;
  });

  criterion(2, "exact moment/cumulant roundtrip on 200 random sequences", 60, [] {
    Outcome o;
    std::mt19937_64 rng(2);
    int bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Q> values;
      for (int k = 0; k < 8; ++k) values.push_back(random_rational(rng, 20, 9));
      const MomentSequence<Q> m(values);
      if (cumulants_to_moments(moments_to_cumulants(m)) != m) ++bad;
    }
    o.require(bad == 0, std::to_string(bad) + " sequences changed");
    return o;
  });

  criterion(3, "FreePoisson(1,1) moments are Catalan numbers", 10, [] {
    Outcome o;
    const auto m = moment_sequence<Q>(FreePoisson{Q(1), Q(1)}, 10);
    const std::vector<Q> expect{1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796};
    o.require(std::vector<Q>(m.values().begin(), m.values().end()) == expect, "moment mismatch");
    return o;
  });

  criterion(4, "row-sum cumulant error decays as 1/N", 30, [] {
    Outcome o;
    const TriangularArraySpec spec{{ArrayFamily{Q(1), Q(1)}}};
    const std::vector<std::int64_t> small{10, 100, 1000};
    for (const auto& row : convergence_table<Q>(spec, 0, small, 2)) {
      if (row.n != 2) continue;
      o.require(row.error == Q(1, row.N), "n=2 error at N=" + std::to_string(row.N) + " is " + to_string(row.error));
    }
    const std::vector<std::int64_t> Ns{100, 1000, 10000, 100000};
    o.require(convergence_table<Q>(spec, 0, small, 2).size() == 6, "table shape");
    std::string slopes;
    for (int n : {3, 4}) {
      std::vector<double> xs;
      std::vector<double> ys;
      for (const auto& row : convergence_table<Q>(spec, 0, Ns, n)) {
        if (row.n != n) continue;
        xs.push_back(static_cast<double>(row.N));
        ys.push_back(to_double(row.error));
      }
      const double slope = loglog_slope(xs, ys);
      slopes += (slopes.empty() ? "" : ", ") + ("n=" + std::to_string(n) + " slope " + fmt(slope));
      o.require(std::abs(slope + 1.0) <= 0.05, "n=" + std::to_string(n) + " slope " + fmt(slope));
    }
    if (o.pass) o.detail = slopes;
    return o;
  });

  criterion(5, "free Poisson classifier on sums", 10, [] {
    Outcome o;
    const Q tol(1, 1000000000);
    auto fp = [](const Q& t, const Q& a) { return cumulant_sequence<Q>(FreePoisson{t, a}, 6); };
    const Q t(3, 2);
    for (const Q& a : {Q(1), Q(-2), Q(1, 3)}) {
      const auto fit = classify_free_poisson(free_convolve(fp(t, a), fp(t, a)), tol);
      o.require(fit && fit->lambda == 2 * t && fit->alpha == a, "self-sum with alpha " + to_string(a));
    }
    const std::vector<std::pair<Q, Q>> pairs{{Q(1), Q(-1)}, {Q(1), Q(2)}, {Q(2), Q(-2)}};
    for (const auto& [a1, a2] : pairs) {
      const auto fit = classify_free_poisson(free_convolve(fp(t, a1), fp(t, a2)), tol);
      o.require(!fit, "alphas " + to_string(a1) + ", " + to_string(a2) + " classified free Poisson");
    }
    return o;
  });

  criterion(6, "Karhunen-Loeve eigensystem and Mercer truncation", 120, [] {
    Outcome o;
    const auto sys = kl_eigensystem(1.0, 1.0, 10);
    double ortho = 0.0;
    for (int i = 1; i <= 10; ++i)
      for (int j = i; j <= 10; ++j)
        ortho = std::max(ortho, std::abs(eigenfunction_inner_product(sys, i, j, 10001) - (i == j ? 1.0 : 0.0)));
    o.require(ortho <= 1e-8, "orthonormality " + fmt(ortho));
    double relation = 0.0;
    for (int n = 1; n <= 5; ++n) relation = std::max(relation, eigenrelation_residual(sys, n, 101, 4001));
    o.require(relation <= 1e-6, "eigenrelation " + fmt(relation));
    double cov = 0.0;
    for (int i = 1; i <= 5; ++i)
      for (int j = i; j <= 5; ++j)
        cov = std::max(cov, std::abs(kl_coefficient_covariance(sys, i, j, 801) - (i == j ? sys.eigenvalue(i) : 0.0)));
    o.require(cov <= 1e-6, "coefficient covariance " + fmt(cov));
    const auto full = kl_eigensystem(1.0, 1.0, 200);
    std::vector<double> errs;
    for (int N : {25, 50, 100, 200}) errs.push_back(mercer_truncation_error(full, N, 201));
    o.require(errs.back() <= 0.01, "Mercer error at 200 is " + fmt(errs.back()));
    for (std::size_t i = 1; i < errs.size(); ++i) o.require(errs[i] < errs[i - 1], "Mercer error not decreasing");
    if (o.pass) {
      o.detail = "ortho " + fmt(ortho) + ", eigenrelation " + fmt(relation) + ", covariance " + fmt(cov) +
                 ", Mercer " + fmt(errs[0]) + " > " + fmt(errs[1]) + " > " + fmt(errs[2]) + " > " + fmt(errs[3]);
    }
    return o;
  });

  criterion(7, "step-function integral calculus on 100 random functions", 60, [] {
    Outcome o;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      const auto s = random_disjoint_step(rng);
      const auto kappa = integrate_step(s, 8);
      for (int m = 1; m <= 8; ++m) {
        Q expect(0);
        for (const auto& p : s.pieces()) expect += ipow(p.coefficient, static_cast<unsigned>(m)) * p.interval.length();
        if (kappa[m] != expect) o.require(false, "kappa_" + std::to_string(m) + " on trial " + std::to_string(trial));
      }
      const auto bound = l2_moment_bound(s);
      if (!(bound.lhs <= bound.rhs)) o.require(false, "moment bound on trial " + std::to_string(trial));
      const auto centered = centered_integrate_step(s, 2);
      const Q l2 = l2_norm_squared(s);
      if (centered[1] != 0 || centered[2] != l2 || centered_l2_norm_squared(s) != l2) {
        o.require(false, "isometry on trial " + std::to_string(trial));
      }
      // Split every piece at a random interior point.
      std::vector<StepPiece<Q>> split;
      for (const auto& p : s.pieces()) {
        const Q w(std::uniform_int_distribution<int>(1, 8)(rng), 9);
        const Q mid = p.interval.lo + w * p.interval.length();
        split.push_back({Interval<Q>(p.interval.lo, mid), p.coefficient});
        split.push_back({Interval<Q>(mid, p.interval.hi), p.coefficient});
      }
      if (integrate_step(StepFunction<Q>(split), 8) != kappa) {
        o.require(false, "refinement changed cumulants on trial " + std::to_string(trial));
      }
    }
    return o;
  });

  criterion(8, "refinement of f(x) = x converges to 1/(m+1)", 30, [] {
    Outcome o;
    const PiecewisePoly<Q> exact({PolyPiece<Q>{Interval<Q>(Q(0), Q(1)), {Q(0), Q(1)}}});
    const auto f = to_floating(exact);
    const auto steps = refine_step_integrals(f, 6, 5e-7);
    const auto& last = steps.back().estimate;
    double worst = 0.0;
    for (int m = 1; m <= 6; ++m) worst = std::max(worst, std::abs(last[m] - 1.0 / (m + 1)));
    o.require(worst <= 1e-6, "refined error " + fmt(worst));
    const auto kq = integral_cumulants(exact, 6, 5e-7);
    for (int m = 1; m <= 6; ++m) o.require(kq[m] == Q(1, m + 1), "exact kappa_" + std::to_string(m));
    const auto kd = integral_cumulants(f, 6, 5e-7);
    double gap = 0.0;
    for (int m = 1; m <= 6; ++m) gap = std::max(gap, std::abs(kd[m] - last[m]));
    o.require(gap <= 1e-6, "refined vs exact " + fmt(gap));
    if (o.pass) {
      o.detail = "mesh " + fmt(steps.back().mesh) + ", max error " + fmt(worst) + " after " +
                 std::to_string(steps.size()) + " doublings";
    }
    return o;
  });

  criterion(9, "random-matrix oracle at d = 2000", 300, [threads] {
    Outcome o;
    const int d = 2000;
    const int seeds = 8;
    std::vector<double> mean(5, 0.0);
    for (int seed = 0; seed < seeds; ++seed) {
      const auto m = rmt::empirical_moments(rmt::sample_free_poisson({d, static_cast<std::uint64_t>(seed), 1}, 1.0), 4);
      for (int k = 1; k <= 4; ++k) mean[k] += m[k] / seeds;
    }
    const double catalan[5] = {0, 1, 2, 5, 14};
    double rel = 0.0;
    for (int k = 1; k <= 4; ++k) rel = std::max(rel, std::abs(mean[k] - catalan[k]) / catalan[k]);
    o.require(rel <= 0.07, "Wishart moment relative error " + fmt(rel));

    double mixed = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
      const rmt::EnsembleConfig cfg{d, static_cast<std::uint64_t>(100 + seed), 1};
      const auto a = rmt::haar_conjugate(rmt::sample_free_poisson(cfg, 1.0, {0, 0}), cfg, {0, 0});
      const auto b = rmt::haar_conjugate(rmt::sample_free_poisson(cfg, 1.0, {1, 0}), cfg, {1, 0});
      mixed = std::max(mixed, std::abs(rmt::mixed_second_cumulant(a, b)));
    }
    o.require(mixed <= 0.05, "mixed second cumulant " + fmt(mixed));

    const StepFunction<double> s({{Interval<double>(0, 1), 2.0}, {Interval<double>(1, 3), -1.0}});
    const auto report = rmt::simulate_report(s, {d, 200, seeds}, 4, threads);
    double sim = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      sim = std::max(sim, report.abs_error[k] / std::max(1.0, std::abs(report.predicted[k])));
    }
    o.require(sim <= 0.10, "step-integral moment error " + fmt(sim));

    const PiecewisePoly<double> zero;
    const std::vector<PiecewisePoly<double>> gs{
        PiecewisePoly<double>::from_step(StepFunction<double>({{Interval<double>(0, 1), 1.0}})),
        poly({PolyPiece<double>{Interval<double>(0, 1), {0.0, 1.0}}}),
        PiecewisePoly<double>::from_step(
            StepFunction<double>({{Interval<double>(0, 1), 2.0}, {Interval<double>(1, 2), 0.5}})),
    };
    const double mesh = 0.25;
    double min_eig = 0.0;
    double l1_ratio = 0.0;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const rmt::EnsembleConfig cfg{d, 300 + i, 2};
      min_eig = std::min(min_eig, rmt::check_positivity_order(zero, gs[i], cfg, mesh));
      const auto l1 = rmt::check_l1_contraction(gs[i], cfg, mesh);
      l1_ratio = std::max(l1_ratio, l1.lhs / l1.rhs);
    }
    o.require(min_eig >= -1e-9, "minimum eigenvalue " + fmt(min_eig));
    o.require(l1_ratio <= 1.05, "L1 ratio " + fmt(l1_ratio));
    if (o.pass) {
      o.detail = "Wishart " + fmt(rel) + ", mixed " + fmt(mixed) + ", step " + fmt(sim) + ", min eig " +
                 fmt(min_eig) + ", L1 ratio " + fmt(l1_ratio);
    }
    return o;
  });

  criterion(10, "seeded reports are byte-identical", 0, [] {
    Outcome o;
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / ("freeprob_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const auto step = (dir / "step.json").string();
    std::ofstream(step) << R"({"pieces":[{"lo":0,"hi":1,"c":2},{"lo":1,"hi":3,"c":-1}]})";
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    const std::string base = std::string(FREEPROB_CLI_PATH) + " simulate --d 300 --samples 4 --seed 11 --step " + step;
    std::vector<std::string> outputs;
    for (const char* run : {"a.json", "b.json"}) {
      const auto out = dir / run;
      o.require(std::system((base + " --threads 1 --out " + out.string()).c_str()) == 0, "CLI run failed");
      outputs.push_back(slurp(out));
    }
    const auto threaded = dir / "c.json";
    o.require(std::system((base + " --threads 4 --out " + threaded.string()).c_str()) == 0, "CLI run failed");
    outputs.push_back(slurp(threaded));
    o.require(!outputs[0].empty(), "empty report");
    o.require(outputs[0] == outputs[1], "repeated runs differ");
    o.require(outputs[0] == outputs[2], "thread count changed the report");
    fs::remove_all(dir);
    return o;
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
