#ifndef MANPG_SOLVERS_HPP
#define MANPG_SOLVERS_HPP

#include <functional>
#include <limits>
#include <vector>

#include "manpg/problems.hpp"
#include "manpg/ssn.hpp"
#include "manpg/stiefel.hpp"

namespace manpg {

struct SolverConfig {
  double t0 = 0.0;        // <= 0 means 1/L
  double gamma = 0.5;     // line-search shrink
  double tau = 1.01;      // Ada stepsize growth
  double eps_scale = 1e-8;  // outer tolerance is eps_scale * n * r on ||V/t||^2
  int max_iter = 30000;
  RetractionKind retraction = RetractionKind::Polar;
  int max_backtracks = 40;
  // stop early once F(X) <= f_target + 1e-7 (NaN disables; used when pairing
  // solvers against a reference objective value)
  double f_target = std::numeric_limits<double>::quiet_NaN();
  SsnConfig ssn;  // tol is overwritten by the coupling rule each iteration
  std::function<void(const struct IterateStats&)> progress;

  void validate() const;
};

struct IterateStats {
  int k = 0;
  double objective = 0.0;
  double v_norm = 0.0;
  double alpha = 1.0;
  int backtracks = 0;
  int ssn_iters = 0;
  double t = 0.0;
  double feasibility = 0.0;  // ||X'X - I||_F of the accepted iterate
  double wall_s = 0.0;
};

enum class SolverStatus { Converged, MaxIter };

struct SolverResult {
  StiefelPoint X;
  double F = 0.0;
  std::vector<IterateStats> stats;
  SolverStatus status = SolverStatus::MaxIter;
  int iterations = 0;
  long total_backtracks = 0;
  double mean_ssn_iters = 0.0;
};

SolverResult manpg(const ProblemOracle& problem, const StiefelPoint& X0,
                   const SolverConfig& cfg);

SolverResult manpg_ada(const ProblemOracle& problem, const StiefelPoint& X0,
                       const SolverConfig& cfg);

struct ArmijoResult {
  double alpha = 1.0;
  StiefelPoint X_next;
  double F_next = 0.0;
  int backtracks = 0;
};

// Backtracking on F(Retr_X(alpha V)) <= F(X) - alpha ||V||^2 / (2t).
ArmijoResult armijo_search(const ProblemOracle& problem, const StiefelPoint& X,
                           const TangentVector& V, double t, double gamma,
                           int max_backtracks,
                           RetractionKind kind = RetractionKind::Polar);

// X_{k+1} = Retr(-(1/k^{3/4}) Proj_T subgrad F); used as the shared warm start.
StiefelPoint riemannian_subgradient(const ProblemOracle& problem, const StiefelPoint& X0,
                                    int iters);

struct StationarityCheck {
  bool is_eps_stationary = false;
  double v_norm = 0.0;
};

// Solves one subproblem at t = 1/L and tests ||V|| <= eps / L.
StationarityCheck check_stationarity(const ProblemOracle& problem, const StiefelPoint& X,
                                     double L, double eps);

}  // namespace manpg

#endif  // MANPG_SOLVERS_HPP
