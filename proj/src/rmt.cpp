#include "freeprob/rmt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "freeprob/error.hpp"

namespace freeprob::rmt {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31U);
}

std::uint64_t stream_seed(std::uint64_t seed, const StreamId& id) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(id.purpose));
  h = splitmix64(h ^ id.piece);
  h = splitmix64(h ^ id.draw);
  return h;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

void validate(const EnsembleConfig& cfg) {
  if (cfg.dimension < 2) throw DomainError("ensemble dimension d must be at least 2");
  if (cfg.samples < 1) throw DomainError("ensemble sample count must be positive");
}

MatrixSample::MatrixSample(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols() || values_.rows() == 0) throw DomainError("matrix sample must be square");
  if (!values_.allFinite()) throw DomainError("matrix sample has non-finite entries");
  const double scale = std::max(1.0, values_.cwiseAbs().maxCoeff());
  if ((values_ - values_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("matrix sample is not symmetric");
  }
}

MatrixSample MatrixSample::zero(int dimension) { return MatrixSample(Eigen::MatrixXd::Zero(dimension, dimension)); }

GaussianStream::GaussianStream(std::uint64_t seed, const StreamId& id) : engine_(stream_seed(seed, id)) {}

double GaussianStream::uniform() { return static_cast<double>(engine_() >> 11U) * 0x1.0p-53; }

double GaussianStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double r2 = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    r2 = u * u + v * v;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, GaussianStream& stream) {
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = stream.normal();
  }
  return g;
}

Eigen::MatrixXd haar_orthogonal(int dimension, GaussianStream& stream) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(dimension, dimension, stream));
  Eigen::MatrixXd q = qr.householderQ();
  const auto diagonal = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (diagonal(j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

MatrixSample sample_free_poisson(const EnsembleConfig& cfg, double lambda, const StreamId& stream) {
  validate(cfg);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("free Poisson rate lambda must be positive");
  const double columns = std::round(lambda * cfg.dimension);
  if (columns < 1.0) {
    throw DomainError("lambda = " + std::to_string(lambda) + " gives fewer than one Wishart column at d = " +
                      std::to_string(cfg.dimension));
  }
  GaussianStream gauss(cfg.seed, {stream.piece, stream.draw, StreamPurpose::wishart});
  const Eigen::MatrixXd g = gaussian_matrix(cfg.dimension, static_cast<int>(columns), gauss);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(cfg.dimension, cfg.dimension);
  w.selfadjointView<Eigen::Lower>().rankUpdate(g, 1.0 / cfg.dimension);
  w.triangularView<Eigen::StrictlyUpper>() = w.transpose();
  return MatrixSample(std::move(w));
}

MatrixSample haar_conjugate(const MatrixSample& m, const EnsembleConfig& cfg, const StreamId& stream) {
  GaussianStream gauss(cfg.seed, {stream.piece, stream.draw, StreamPurpose::haar});
  const Eigen::MatrixXd u = haar_orthogonal(m.dimension(), gauss);
  const Eigen::MatrixXd um = u * m.matrix();
  return MatrixSample(symmetrized(um * u.transpose()));
}

MomentSequence<double> empirical_moments(const MatrixSample& m, int order) {
  if (order < 1) throw DomainError("order must be positive");
  const double d = m.dimension();
  // powers[j] = m^(j+1); tr(m^k) = sum(m^a .* m^b) with a + b = k, m symmetric.
  std::vector<Eigen::MatrixXd> powers{m.matrix()};
  const int needed = (order + 1) / 2;
  while (static_cast<int>(powers.size()) < needed) powers.push_back(powers.back() * m.matrix());
  std::vector<double> moments;
  moments.reserve(static_cast<std::size_t>(order));
  moments.push_back(m.matrix().trace() / d);
  for (int k = 2; k <= order; ++k) {
    const int a = (k + 1) / 2;
    const int b = k / 2;
    moments.push_back(powers[a - 1].cwiseProduct(powers[b - 1]).sum() / d);
  }
  return MomentSequence<double>(std::move(moments));
}

double mixed_second_cumulant(const MatrixSample& a, const MatrixSample& b) {
  if (a.dimension() != b.dimension()) throw DomainError("mixed_second_cumulant: dimensions differ");
  const double d = a.dimension();
  return a.matrix().cwiseProduct(b.matrix()).sum() / d - (a.matrix().trace() / d) * (b.matrix().trace() / d);
}

double min_eigenvalue(const MatrixSample& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double normalized_trace_norm(const MatrixSample& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum() / m.dimension();
}

MatrixSample simulate_step_integral(const StepFunction<double>& s, const EnsembleConfig& cfg, std::uint64_t draw) {
  validate(cfg);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(cfg.dimension, cfg.dimension);
  std::uint64_t piece = 0;
  for (const auto& p : s.pieces()) {
    const StreamId id{piece++, draw, StreamPurpose::wishart};
    const auto w = sample_free_poisson(cfg, p.interval.length(), id);
    sum += p.coefficient * haar_conjugate(w, cfg, id).matrix();
  }
  return MatrixSample(std::move(sum));
}

double check_positivity_order(const PiecewisePoly<double>& f, const PiecewisePoly<double>& g,
                              const EnsembleConfig& cfg, double mesh) {
  validate(cfg);
  const auto h = g - f;
  // Validate f <= g on a uniform grid over both supports plus every piece midpoint.
  std::vector<double> probes;
  for (const auto* q : {&f, &g}) {
    if (const auto hull = q->support_hull()) {
      constexpr int kGrid = 4096;
      for (int i = 0; i <= kGrid; ++i) probes.push_back(hull->lo + hull->length() * i / kGrid);
    }
  }
  for (const auto& p : h.pieces()) probes.push_back(0.5 * (p.interval.lo + p.interval.hi));
  for (double x : probes) {
    const double gap = h(x);
    if (gap < -1e-12 * std::max({1.0, std::abs(f(x)), std::abs(g(x))})) {
      throw DomainError("check_positivity_order: f <= g fails at x = " + std::to_string(x));
    }
  }
  const auto s = approximate(h, mesh);
  if (s.is_zero()) return 0.0;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.samples; ++k) {
    worst = std::min(worst, min_eigenvalue(simulate_step_integral(s, cfg, static_cast<std::uint64_t>(k))));
  }
  return worst;
}

L1Contraction check_l1_contraction(const PiecewisePoly<double>& f, const EnsembleConfig& cfg, double mesh) {
  validate(cfg);
  L1Contraction out{0.0, l1_norm(f), 0.0, 2.0 * l1_norm(f)};
  const auto s = approximate(f, mesh);
  if (s.is_zero()) return out;
  // Center by the integral of the simulated step function, the mean of X(s).
  const double mean = integral(s);
  for (int k = 0; k < cfg.samples; ++k) {
    const auto x = simulate_step_integral(s, cfg, static_cast<std::uint64_t>(k));
    out.lhs += normalized_trace_norm(x);
    Eigen::MatrixXd centered = x.matrix();
    centered.diagonal().array() -= mean;
    out.centered_lhs += normalized_trace_norm(MatrixSample(std::move(centered)));
  }
  out.lhs /= cfg.samples;
  out.centered_lhs /= cfg.samples;
  return out;
}

SimulationReport simulate_report(const StepFunction<double>& s, const EnsembleConfig& cfg, int order, int threads) {
  validate(cfg);
  SimulationReport report;
  const auto predicted = cumulants_to_moments(integrate_step(s, order));
  report.predicted.assign(predicted.values().begin(), predicted.values().end());

  std::vector<std::vector<double>> per_draw(static_cast<std::size_t>(cfg.samples));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int k = next++; k < cfg.samples; k = next++) {
      try {
        const auto x = simulate_step_integral(s, cfg, static_cast<std::uint64_t>(k));
        const auto m = empirical_moments(x, order);
        per_draw[k].assign(m.values().begin(), m.values().end());
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, cfg.samples);
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  report.empirical.assign(static_cast<std::size_t>(order), 0.0);
  for (const auto& draw : per_draw) {
    for (int k = 0; k < order; ++k) report.empirical[k] += draw[k];
  }
  for (int k = 0; k < order; ++k) {
    report.empirical[k] /= cfg.samples;
    report.abs_error.push_back(std::abs(report.empirical[k] - report.predicted[k]));
  }
  return report;
}

}  // namespace freeprob::rmt
