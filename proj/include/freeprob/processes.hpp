#pragma once

#include <variant>
#include <vector>

#include "freeprob/cumulants.hpp"
#include "freeprob/distributions.hpp"
#include "freeprob/scalar.hpp"

namespace freeprob {

/// kappa_n(X_t - X_s) = rate (t - s) alpha^n.
struct FreePoissonProcess {
  int rate = 1;
  Rational alpha;
};

/// kappa_n(a_I) = rate |I| m_n(nu).
struct CompoundFreePoissonProcess {
  int rate = 1;
  JumpLaw jump;
};

using ProcessSpec = std::variant<FreePoissonProcess, CompoundFreePoissonProcess>;

void validate(const ProcessSpec& p);

/// Cumulants of the increment over [s, t).  Requires 0 <= s < t.
template <Scalar T>
CumulantSequence<T> increment_cumulants(const ProcessSpec& p, const T& s, const T& t, int order);

/// Sum of freely independent processes.  Free Poisson inputs are lifted to
/// the jump law delta_alpha; the result has rate sum_i k_i and jump law
/// sum_i (k_i / sum k) nu_i, i.e. the uniform mixture when rates agree.
/// Atoms are merged and sorted by location.
CompoundFreePoissonProcess sum_processes(const std::vector<ProcessSpec>& processes);

/// kappa_2(X_s, X_t) = rate min(s, t) alpha^2 for a free Poisson process.
template <Scalar T>
T covariance_kernel(const ProcessSpec& p, const T& s, const T& t);

/// Closed-form Karhunen-Loeve eigenpairs of the kernel alpha^2 min(s, t) on
/// [0, T] (rate 1):
///   lambda_n = alpha^2 T^2 / ((n - 1/2)^2 pi^2),
///   phi_n(t) = sqrt(2 / T) sin((n - 1/2) pi t / T).
class KLEigenSystem {
 public:
  KLEigenSystem(double alpha, double horizon, int count);

  double alpha() const { return alpha_; }
  double horizon() const { return horizon_; }
  int count() const { return count_; }

  double eigenvalue(int n) const;
  double eigenfunction(int n, double t) const;
  std::vector<double> eigenvalues() const;
  double kernel(double s, double t) const;

 private:
  double alpha_;
  double horizon_;
  int count_;
};

KLEigenSystem kl_eigensystem(double alpha, double horizon, int count);

/// max over a grid x grid lattice of [0, T]^2 of
/// |k(s, t) - sum_{i <= N} lambda_i phi_i(s) phi_i(t)|.
double mercer_truncation_error(const KLEigenSystem& sys, int N, int grid);

/// int_0^T phi_i phi_j dt by Simpson with `points` nodes.
double eigenfunction_inner_product(const KLEigenSystem& sys, int i, int j, int points);

/// int_0^T k(s, t) phi_n(s) ds, split at the kink s = t.
double kernel_apply(const KLEigenSystem& sys, int n, double t, int points);

/// max over `grid` points t in [0, T] of |int k(s, t) phi_n(s) ds - lambda_n phi_n(t)|.
double eigenrelation_residual(const KLEigenSystem& sys, int n, int grid, int points);

/// phi(X~_i X~_j) = int int k(s, t) phi_i(s) phi_j(t) ds dt by nested Simpson.
double kl_coefficient_covariance(const KLEigenSystem& sys, int i, int j, int quad_points);

}  // namespace freeprob
