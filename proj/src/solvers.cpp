#include "manpg/solvers.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace manpg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolverResult run_proximal_gradient(const ProblemOracle& problem, const StiefelPoint& X0,
                                   const SolverConfig& cfg, bool adaptive) {
  cfg.validate();
  double L = problem.lipschitz();
  if (L <= 0.0) throw std::invalid_argument("manpg: problem must supply L > 0");
  double t = cfg.t0 > 0.0 ? cfg.t0 : 1.0 / L;
  double t_min = 1.0 / L;

  Eigen::Index n = X0.n(), r = X0.r();
  double eps_tol = cfg.eps_scale * static_cast<double>(n) * static_cast<double>(r);

  StiefelPoint X = X0;
  double F = problem.eval_F(X.matrix());
  PackedMultiplier Lambda = PackedMultiplier::zero(r);
  bool have_warm_start = false;

  SolverResult out{X0};
  out.stats.reserve(256);
  auto clock0 = std::chrono::steady_clock::now();

  long ssn_total = 0;
  SolverStatus status = SolverStatus::MaxIter;
  int k = 0;
  for (; k < cfg.max_iter; ++k) {
    Eigen::MatrixXd g = problem.eval_grad_f(X.matrix());
    SubproblemInstance inst(X, g, t, problem.term());
    SsnConfig scfg = cfg.ssn;
    scfg.tol = ssn_inner_tol(t, eps_tol);
    SsnResult sub = ssn_solve(inst, have_warm_start ? Lambda : PackedMultiplier::zero(r), scfg);
    Lambda = sub.multiplier;
    have_warm_start = true;
    ssn_total += sub.iters;

    // The dual residual appears as a normal component of V of the same size;
    // strip it so the search direction is exactly tangent.
    TangentVector V = tangent_project(X, sub.V.data);
    double v2 = V.data.squaredNorm();

    if (!sub.converged && sub.residual > 1e-4 * std::max(1.0, V.data.norm()))
      throw std::runtime_error("manpg: inner solve failed to produce a usable direction");

    double scaled = v2 / (t * t);
    if (scaled <= eps_tol) {
      status = SolverStatus::Converged;
      break;
    }

    // Near stationarity a warm-started multiplier can pass the residual test
    // while V is still inaccurate relative to its own (small) norm, which
    // breaks the line-search model.  On failure, refine the inner solve with a
    // much tighter tolerance and retry.
    std::optional<ArmijoResult> ls;
    for (int attempt = 0;; ++attempt) {
      try {
        ls.emplace(armijo_search(problem, X, V, t, cfg.gamma, cfg.max_backtracks,
                                 cfg.retraction));
        break;
      } catch (const std::runtime_error&) {
        if (attempt >= 2) throw;
        scfg.tol = std::max(1e-26, 1e-6 * scfg.tol);
        sub = ssn_solve(inst, Lambda, scfg);
        Lambda = sub.multiplier;
        ssn_total += sub.iters;
        V = tangent_project(X, sub.V.data);
        v2 = V.data.squaredNorm();
        if (v2 / (t * t) <= eps_tol) break;
      }
    }
    if (!ls) {
      status = SolverStatus::Converged;
      break;
    }
    X = std::move(ls->X_next);
    F = ls->F_next;
    out.total_backtracks += ls->backtracks;

    IterateStats st;
    st.k = k;
    st.objective = F;
    st.v_norm = std::sqrt(v2);
    st.alpha = ls->alpha;
    st.backtracks = ls->backtracks;
    st.ssn_iters = sub.iters;
    st.t = t;
    st.feasibility = X.feasibility_error();
    st.wall_s = seconds_since(clock0);
    out.stats.push_back(st);
    if (cfg.progress) cfg.progress(st);

    if (adaptive) {
      if (ls->backtracks == 0)
        t *= cfg.tau;
      else
        t = std::max(t_min, t / cfg.tau);
    }

    if (std::isfinite(cfg.f_target) && F <= cfg.f_target + 1e-7) {
      ++k;
      status = SolverStatus::Converged;
      break;
    }
  }

  out.X = std::move(X);
  out.F = problem.eval_F(out.X.matrix());
  out.status = status;
  out.iterations = k;
  out.mean_ssn_iters = k > 0 ? static_cast<double>(ssn_total) / k : static_cast<double>(ssn_total);
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("SolverConfig: gamma in (0,1)");
  if (!(tau > 1.0)) throw std::invalid_argument("SolverConfig: tau > 1");
  if (eps_scale <= 0.0) throw std::invalid_argument("SolverConfig: eps_scale > 0");
  if (max_iter < 1 || max_backtracks < 1)
    throw std::invalid_argument("SolverConfig: iteration limits must be positive");
}

SolverResult manpg(const ProblemOracle& problem, const StiefelPoint& X0,
                   const SolverConfig& cfg) {
  return run_proximal_gradient(problem, X0, cfg, /*adaptive=*/false);
}

SolverResult manpg_ada(const ProblemOracle& problem, const StiefelPoint& X0,
                       const SolverConfig& cfg) {
  return run_proximal_gradient(problem, X0, cfg, /*adaptive=*/true);
}

ArmijoResult armijo_search(const ProblemOracle& problem, const StiefelPoint& X,
                           const TangentVector& V, double t, double gamma,
                           int max_backtracks, RetractionKind kind) {
  double F = problem.eval_F(X.matrix());
  if (!std::isfinite(F)) throw std::invalid_argument("armijo_search: F(X) not finite");
  double v2 = V.data.squaredNorm();
  double alpha = 1.0;
  for (int nb = 0; nb <= max_backtracks; ++nb) {
    StiefelPoint Xn = retract(X, alpha * V.data, kind);
    double Fn = problem.eval_F(Xn.matrix());
    if (Fn <= F - alpha * v2 / (2.0 * t))
      return ArmijoResult{alpha, std::move(Xn), Fn, nb};
    alpha *= gamma;
  }
  throw std::runtime_error(
      "armijo_search: backtracking exhausted; check the Lipschitz constant and prox");
}

StiefelPoint riemannian_subgradient(const ProblemOracle& problem, const StiefelPoint& X0,
                                    int iters) {
  StiefelPoint X = X0;
  for (int k = 1; k <= iters; ++k) {
    Eigen::MatrixXd sg = problem.euclidean_subgradient(X.matrix());
    TangentVector dir = tangent_project(X, sg);
    double step = 1.0 / std::pow(static_cast<double>(k), 0.75);
    X = retract(X, -step * dir.data, RetractionKind::Polar);
  }
  return X;
}

StationarityCheck check_stationarity(const ProblemOracle& problem, const StiefelPoint& X,
                                     double L, double eps) {
  if (L <= 0.0) throw std::invalid_argument("check_stationarity: L must be > 0");
  double t = 1.0 / L;
  SubproblemInstance inst(X, problem.eval_grad_f(X.matrix()), t, problem.term());
  SsnConfig cfg;
  cfg.tol = std::max(1e-13, 1e-4 * (eps / L) * (eps / L));
  SsnResult sub = ssn_solve(inst, PackedMultiplier::zero(X.r()), cfg);
  if (!sub.converged && tangent_defect(X, sub.V.data) > 1e-6)
    throw std::runtime_error("check_stationarity: inner solve did not converge");
  double vn = sub.V.data.norm();
  return StationarityCheck{vn <= eps / L, vn};
}

}  // namespace manpg
