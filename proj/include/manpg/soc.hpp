#ifndef MANPG_SOC_HPP
#define MANPG_SOC_HPP

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "manpg/problems.hpp"
#include "manpg/stiefel.hpp"

namespace manpg {

// Three-block ADMM state for the Q = P, X = P splitting.
struct SocState {
  Eigen::MatrixXd P, Q, X;
  Eigen::MatrixXd Lam, Gam;  // scaled duals for Q = P and X = P
  double beta = 1.0;

  static SocState from_point(const StiefelPoint& X0, double beta);
};

// ||Q-P||/max{1,||Q||,||P||} + ||X-P||/max{1,||X||,||P||}
double feasibility_residual(const SocState& s);

// One SOC sweep for the CM objective Tr(P'HP) + mu||Q||_1. Builds a dense
// factorization of 2H + 2 beta I per call; use SocCmSolver for runs.
void soc_step_cm(SocState& s, const Eigen::MatrixXd& H, double mu);

// One SOC sweep for sparse PCA (-Tr(P'A'AP) + mu||Q||_1); dense per-call
// factorization, see SocSpcaSolver for runs.
void soc_step_spca(SocState& s, const Eigen::MatrixXd& A, double mu);

// Cached CM stepper. When H is circulant the P-system is diagonalized by the
// FFT; otherwise a dense LDLT factorization is reused.
class SocCmSolver {
 public:
  SocCmSolver(const Eigen::MatrixXd& H, double mu, double beta);

  void step(SocState& s) const;
  double objective(const Eigen::MatrixXd& X) const;
  double beta() const { return beta_; }

 private:
  Eigen::MatrixXd solve_p_system(const Eigen::MatrixXd& rhs) const;

  Eigen::MatrixXd H_;
  double mu_;
  double beta_;
  bool circulant_ = false;
  Eigen::VectorXcd system_eigs_;  // DFT of first column of 2H + 2 beta I
  Eigen::LDLT<Eigen::MatrixXd> dense_;
};

// Cached sparse PCA stepper; the P-system (2 beta I - 2A'A) is solved through
// a one-time eigendecomposition of A'A. beta defaults to 2 sigma_max(A)^2
// nudged up so the system stays positive definite.
class SocSpcaSolver {
 public:
  SocSpcaSolver(const Eigen::MatrixXd& A, double mu, double beta = -1.0);

  void step(SocState& s) const;
  double objective(const Eigen::MatrixXd& X) const;
  double beta() const { return beta_; }

 private:
  Eigen::MatrixXd A_;
  double mu_;
  double beta_;
  Eigen::MatrixXd evecs_;
  Eigen::VectorXd inv_eigs_;  // of 2 beta I - 2 A'A
};

struct SocResult {
  StiefelPoint X;
  double F = 0.0;
  int iterations = 0;
  double feasibility = 0.0;
  bool converged = false;
  bool standalone = false;  // no objective target was available
};

// Runs SOC from X0. Stops when the feasibility residual is <= feas_tol and,
// when f_target is finite, F(X_k) <= f_target + 1e-7; capped at max_iter.
template <class Stepper>
SocResult soc_run(const Stepper& stepper, const StiefelPoint& X0,
                  double f_target = std::numeric_limits<double>::quiet_NaN(),
                  int max_iter = 30000, double feas_tol = 1e-4);

}  // namespace manpg

#endif  // MANPG_SOC_HPP
