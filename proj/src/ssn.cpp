#include "manpg/ssn.hpp"

#include <cmath>
#include <stdexcept>

namespace manpg {

Eigen::VectorXd pack_symmetric(const Eigen::MatrixXd& S) {
  Eigen::Index r = S.rows();
  if (S.cols() != r) throw std::invalid_argument("pack_symmetric: matrix not square");
  Eigen::VectorXd v(packed_size(r));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = j; i < r; ++i) v(k++) = S(i, j);
  return v;
}

Eigen::MatrixXd unpack_symmetric(const Eigen::VectorXd& v, Eigen::Index r) {
  if (v.size() != packed_size(r))
    throw std::invalid_argument("unpack_symmetric: size mismatch");
  Eigen::MatrixXd S(r, r);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = j; i < r; ++i) {
      S(i, j) = v(k);
      S(j, i) = v(k);
      ++k;
    }
  return S;
}

Eigen::VectorXd packed_weights(Eigen::Index r) {
  Eigen::VectorXd w(packed_size(r));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = j; i < r; ++i) w(k++) = (i == j) ? 1.0 : 2.0;
  return w;
}

SubproblemInstance::SubproblemInstance(StiefelPoint X_, Eigen::MatrixXd egrad_, double t_,
                                       NonsmoothTerm term_)
    : X(std::move(X_)), egrad(std::move(egrad_)), t(t_), term(term_) {
  if (t <= 0.0) throw std::invalid_argument("SubproblemInstance: t must be > 0");
  if (egrad.rows() != X.n() || egrad.cols() != X.r())
    throw std::invalid_argument("SubproblemInstance: gradient shape mismatch");
}

double ssn_inner_tol(double t, double eps_outer) {
  return std::max(1e-13, std::min(1e-11, 1e-3 * t * t * eps_outer));
}

Eigen::MatrixXd apply_A(const StiefelPoint& X, const Eigen::MatrixXd& V) {
  if (V.rows() != X.n() || V.cols() != X.r())
    throw std::invalid_argument("apply_A: shape mismatch");
  Eigen::MatrixXd M = X.matrix().transpose() * V;
  return M + M.transpose();
}

Eigen::MatrixXd apply_A_adjoint(const StiefelPoint& X, const Eigen::MatrixXd& Lambda) {
  if (Lambda.rows() != X.r() || Lambda.cols() != X.r())
    throw std::invalid_argument("apply_A_adjoint: shape mismatch");
  if ((Lambda - Lambda.transpose()).norm() > 1e-10 * std::max(1.0, Lambda.norm()))
    throw std::invalid_argument("apply_A_adjoint: Lambda must be symmetric");
  return 2.0 * X.matrix() * Lambda;
}

Eigen::MatrixXd compute_B(const SubproblemInstance& inst, const PackedMultiplier& Lambda) {
  Eigen::MatrixXd L = Lambda.unpack(inst.X.r());
  return inst.X.matrix() - inst.t * (inst.egrad - apply_A_adjoint(inst.X, L));
}

Eigen::MatrixXd compute_V(const SubproblemInstance& inst, const PackedMultiplier& Lambda) {
  Eigen::MatrixXd B = compute_B(inst, Lambda);
  if (inst.term.prox_weight() == 0.0) return B - inst.X.matrix();
  return prox_eval(inst.term, inst.t, B) - inst.X.matrix();
}

Eigen::MatrixXd residual_E(const SubproblemInstance& inst, const PackedMultiplier& Lambda) {
  return apply_A(inst.X, compute_V(inst, Lambda));
}

double subproblem_objective(const SubproblemInstance& inst, const Eigen::MatrixXd& V) {
  double smooth = (inst.egrad.array() * V.array()).sum() + V.squaredNorm() / (2.0 * inst.t);
  double h = inst.term.prox_weight() == 0.0 ? 0.0 : h_eval(inst.term, inst.X.matrix() + V);
  return smooth + h;
}

Eigen::MatrixXd SsnJacobian::scaled_symmetric() const {
  Eigen::MatrixXd S = sqrt_w.asDiagonal() * packed * sqrt_w.cwiseInverse().asDiagonal();
  return 0.5 * (S + S.transpose());
}

SsnJacobian jacobian_G(const SubproblemInstance& inst, const PackedMultiplier& Lambda) {
  Eigen::Index r = inst.X.r();
  Eigen::Index m = packed_size(r);
  const Eigen::MatrixXd& Xm = inst.X.matrix();
  Eigen::MatrixXd B = compute_B(inst, Lambda);

  SsnJacobian G;
  G.sqrt_w = packed_weights(r).cwiseSqrt();
  G.packed.resize(m, m);

  if (inst.term.prox_weight() == 0.0) {
    // prox is the identity: the map is Delta -> 4t Delta
    G.packed = 4.0 * inst.t * Eigen::MatrixXd::Identity(m, m);
    return G;
  }

  ProxJacobian J = prox_jacobian(inst.term, inst.t, B);
  // column c: directional derivative of packed E along unpack(e_c),
  // i.e. pack(A(J[2t X Delta_c])). Assembled from n x r products; the
  // Kronecker/duplication form is never materialized.
  Eigen::Index c = 0;
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = j; i < r; ++i) {
      Eigen::MatrixXd XD = Xm.col(j) * (2.0 * inst.t) * Eigen::RowVectorXd::Unit(r, i);
      if (i != j) XD += Xm.col(i) * (2.0 * inst.t) * Eigen::RowVectorXd::Unit(r, j);
      G.packed.col(c++) = pack_symmetric(apply_A(inst.X, J.apply(XD)));
    }
  return G;
}

Eigen::VectorXd newton_direction(const SsnJacobian& G, const Eigen::VectorXd& e_packed,
                                 double eta, Eigen::Index dense_threshold) {
  if (eta <= 0.0) throw std::invalid_argument("newton_direction: eta must be > 0");
  Eigen::Index m = e_packed.size();
  if (m <= dense_threshold) {
    Eigen::MatrixXd M = G.packed + eta * Eigen::MatrixXd::Identity(m, m);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    Eigen::VectorXd d = lu.solve(-e_packed);
    double res = (M * d + e_packed).norm();
    if (!d.allFinite() || res > 1e-8 * std::max(1.0, e_packed.norm()))
      throw std::runtime_error("newton_direction: dense solve breakdown");
    return d;
  }
  // CG on the scaled symmetric PD system (Gs + eta I) u = -D e, d = D^{-1} u
  Eigen::MatrixXd Gs = G.scaled_symmetric();
  Eigen::VectorXd b = -(G.sqrt_w.asDiagonal() * e_packed);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd res = b;
  Eigen::VectorXd p = res;
  double rr = res.squaredNorm();
  double tol2 = 1e-20 * b.squaredNorm();
  for (Eigen::Index it = 0; it < 2 * m && rr > tol2; ++it) {
    Eigen::VectorXd Ap = Gs * p + eta * p;
    double alpha = rr / p.dot(Ap);
    if (!std::isfinite(alpha)) throw std::runtime_error("newton_direction: CG breakdown");
    u += alpha * p;
    res -= alpha * Ap;
    double rr_new = res.squaredNorm();
    p = res + (rr_new / rr) * p;
    rr = rr_new;
  }
  return G.sqrt_w.cwiseInverse().asDiagonal() * u;
}

SsnResult ssn_solve(const SubproblemInstance& inst, const PackedMultiplier& Lambda0,
                    const SsnConfig& cfg) {
  Eigen::Index r = inst.X.r();
  if (Lambda0.packed.size() != packed_size(r))
    throw std::invalid_argument("ssn_solve: multiplier size mismatch");
  if (!Lambda0.packed.allFinite())
    throw std::runtime_error("ssn_solve: non-finite warm start");

  PackedMultiplier Lambda = Lambda0;
  Eigen::MatrixXd E = residual_E(inst, Lambda);
  double res2 = E.squaredNorm();

  PackedMultiplier best = Lambda;
  double best_res2 = res2;
  double zeta = 1.0 / (4.0 * inst.t);  // safeguard step for the monotone 4t-Lipschitz map

  int iter = 0;
  for (; iter < cfg.max_iter && res2 > cfg.tol; ++iter) {
    SsnJacobian G = jacobian_G(inst, Lambda);
    double resn = std::sqrt(res2);
    Eigen::VectorXd e = pack_symmetric(E);
    double eta = cfg.lambda_reg * resn;

    Eigen::VectorXd d;
    bool have_dir = false;
    for (int attempt = 0; attempt < 4 && !have_dir; ++attempt) {
      try {
        d = newton_direction(G, e, eta, cfg.dense_threshold);
        have_dir = true;
      } catch (const std::runtime_error&) {
        eta *= 10.0;
      }
    }

    bool accepted = false;
    if (have_dir) {
      double alpha = 1.0;
      for (int ls = 0; ls <= cfg.ls_max_steps; ++ls) {
        PackedMultiplier trial{Lambda.packed + alpha * d};
        Eigen::MatrixXd Et = residual_E(inst, trial);
        double res2t = Et.squaredNorm();
        if (!std::isfinite(res2t)) throw std::runtime_error("ssn_solve: non-finite residual");
        if (std::sqrt(res2t) <= (1.0 - cfg.ls_rho * alpha) * resn) {
          Lambda = std::move(trial);
          E = std::move(Et);
          res2 = res2t;
          accepted = true;
          break;
        }
        alpha *= cfg.ls_shrink;
      }
    }
    if (!accepted) {
      // fixed-point safeguard Lambda <- Lambda - zeta E(Lambda)
      Lambda.packed -= zeta * pack_symmetric(E);
      E = residual_E(inst, Lambda);
      res2 = E.squaredNorm();
      if (!std::isfinite(res2)) throw std::runtime_error("ssn_solve: non-finite residual");
    }
    if (res2 < best_res2) {
      best = Lambda;
      best_res2 = res2;
    }
  }

  if (best_res2 < res2) {
    Lambda = best;
    res2 = best_res2;
  }

  SsnResult out;
  out.V = TangentVector{compute_V(inst, Lambda)};
  out.multiplier = std::move(Lambda);
  out.iters = iter;
  out.residual = std::sqrt(res2);
  out.converged = res2 <= cfg.tol;
  return out;
}

}  // namespace manpg
