#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "freeprob/cumulants.hpp"
#include "freeprob/integration.hpp"

namespace freeprob::rmt {

/// Seeded random-matrix experiment: d x d real symmetric samples under the
/// normalized trace (1/d) tr, which stands in for the tracial state.
struct EnsembleConfig {
  int dimension = 2000;
  std::uint64_t seed = 0;
  int samples = 1;
};

void validate(const EnsembleConfig& cfg);

/// Real symmetric d x d matrix.  The constructor checks squareness, finite
/// entries and symmetry to 1e-12 (relative to the largest entry).
class MatrixSample {
 public:
  explicit MatrixSample(Eigen::MatrixXd values);
  static MatrixSample zero(int dimension);

  const Eigen::MatrixXd& matrix() const { return values_; }
  int dimension() const { return static_cast<int>(values_.rows()); }

 private:
  Eigen::MatrixXd values_;
};

/// Purpose tags keep the Wishart and Haar streams of one piece apart.
enum class StreamPurpose : std::uint64_t { wishart = 1, haar = 2 };

/// Identifies one independent random stream below the experiment seed.
struct StreamId {
  std::uint64_t piece = 0;
  std::uint64_t draw = 0;
  StreamPurpose purpose = StreamPurpose::wishart;
};

/// Standard normal variates for one stream.  The engine is std::mt19937_64
/// seeded with a SplitMix64 hash of (seed, purpose, piece, draw); uniforms
/// take the top 53 bits; normals use the Marsaglia polar method, consuming
/// uniform pairs until one lands inside the unit disc and returning both
/// variates of the accepted pair in order.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, const StreamId& id);

  double uniform();  // [0, 1)
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// rows x cols standard normal matrix, filled column by column.
Eigen::MatrixXd gaussian_matrix(int rows, int cols, GaussianStream& stream);

/// Haar-distributed orthogonal matrix: Q from the QR factorisation of a
/// Gaussian matrix, with column j multiplied by sign(R_jj).
Eigen::MatrixXd haar_orthogonal(int dimension, GaussianStream& stream);

/// (1/d) G G^T with G a d x n standard Gaussian matrix and n = round(lambda d).
/// Its spectral distribution tends to the free Poisson law with rate lambda
/// and jump size 1 (kappa_k = lambda for all k).  Positive semidefinite.
MatrixSample sample_free_poisson(const EnsembleConfig& cfg, double lambda, const StreamId& stream = {});

/// U m U^T with U Haar orthogonal drawn from the stream.
MatrixSample haar_conjugate(const MatrixSample& m, const EnsembleConfig& cfg, const StreamId& stream);

/// (1/d) tr(m^k) for k = 1..order.
MomentSequence<double> empirical_moments(const MatrixSample& m, int order);

/// (1/d) tr(ab) - (1/d) tr(a) (1/d) tr(b): the mixed second cumulant.
double mixed_second_cumulant(const MatrixSample& a, const MatrixSample& b);

double min_eigenvalue(const MatrixSample& m);

/// (1/d) sum |eigenvalue|, the normalized trace norm.
double normalized_trace_norm(const MatrixSample& m);

/// sum_i c_i U_i W_i U_i^T where W_i = sample_free_poisson(lambda = |E_i|)
/// and U_i is an independent Haar conjugation, so each piece has cumulants
/// |E_i| and the pieces are asymptotically free.  Piece i of draw k uses the
/// streams (piece = i, draw = k).
MatrixSample simulate_step_integral(const StepFunction<double>& s, const EnsembleConfig& cfg,
                                    std::uint64_t draw = 0);

inline constexpr double kDefaultMesh = 1.0 / 8.0;

/// Minimum eigenvalue of the simulated X(approximate(g - f, mesh)), taken
/// over cfg.samples draws.  Throws DomainError when f <= g fails on the
/// validation grid.
double check_positivity_order(const PiecewisePoly<double>& f, const PiecewisePoly<double>& g,
                              const EnsembleConfig& cfg, double mesh = kDefaultMesh);

struct L1Contraction {
  double lhs;           // (1/d) tr |X(f)|, averaged over draws
  double rhs;           // ||f||_1
  double centered_lhs;  // (1/d) tr |X(f) - (int f) I|
  double centered_rhs;  // 2 ||f||_1
};

L1Contraction check_l1_contraction(const PiecewisePoly<double>& f, const EnsembleConfig& cfg,
                                   double mesh = kDefaultMesh);

struct SimulationReport {
  std::vector<double> predicted;  // moments from cumulants_to_moments(integrate_step(s))
  std::vector<double> empirical;  // draw-averaged (1/d) tr X^k
  std::vector<double> abs_error;
};

/// Runs cfg.samples independent draws of simulate_step_integral on up to
/// `threads` worker threads.  Draw k always uses draw index k and the draw
/// averages are summed in index order, so the report does not depend on the
/// thread count.
SimulationReport simulate_report(const StepFunction<double>& s, const EnsembleConfig& cfg, int order,
                                 int threads = 1);

}  // namespace freeprob::rmt
