#ifndef MANPG_SSN_HPP
#define MANPG_SSN_HPP

#include <Eigen/Dense>

#include "manpg/prox.hpp"
#include "manpg/stiefel.hpp"

namespace manpg {

// ---- packed storage of symmetric r x r multipliers -------------------------
// Column-major lower-triangular packing: (0,0),(1,0),...,(r-1,0),(1,1),...
// Length r(r+1)/2.

inline Eigen::Index packed_size(Eigen::Index r) { return r * (r + 1) / 2; }

Eigen::VectorXd pack_symmetric(const Eigen::MatrixXd& S);
Eigen::MatrixXd unpack_symmetric(const Eigen::VectorXd& v, Eigen::Index r);

// Duplication weights: 1 for diagonal slots, 2 for off-diagonal slots. The
// Frobenius inner product of symmetric matrices equals the w-weighted dot
// product of their packed vectors.
Eigen::VectorXd packed_weights(Eigen::Index r);

struct PackedMultiplier {
  Eigen::VectorXd packed;

  static PackedMultiplier zero(Eigen::Index r) {
    return {Eigen::VectorXd::Zero(packed_size(r))};
  }
  Eigen::MatrixXd unpack(Eigen::Index r) const { return unpack_symmetric(packed, r); }
};

// ---- subproblem data -------------------------------------------------------

// Frozen data for one tangent-space proximal subproblem at base point X:
//   min_V  <egrad, V> + ||V||^2/(2t) + h(X + V)   s.t.  V'X + X'V = 0
struct SubproblemInstance {
  StiefelPoint X;
  Eigen::MatrixXd egrad;
  double t;
  NonsmoothTerm term;

  SubproblemInstance(StiefelPoint X_, Eigen::MatrixXd egrad_, double t_, NonsmoothTerm term_);
};

struct SsnConfig {
  double tol = 1e-12;             // threshold on ||E(Lambda)||_F^2
  int max_iter = 100;
  double lambda_reg = 0.2;        // eta = lambda_reg * ||E||_F
  double ls_rho = 1e-3;           // sufficient decrease constant
  double ls_shrink = 0.5;
  int ls_max_steps = 10;
  Eigen::Index dense_threshold = 200;  // dense solve when r(r+1)/2 <= this
};

// Inner tolerance coupling to the outer tolerance eps:
// max{1e-13, min{1e-11, 1e-3 t^2 eps}}
double ssn_inner_tol(double t, double eps_outer);

struct SsnResult {
  TangentVector V;
  PackedMultiplier multiplier;
  int iters = 0;
  double residual = 0.0;  // final ||E(Lambda)||_F
  bool converged = false;
};

// ---- operators -------------------------------------------------------------

// A(V) = V'X + X'V
Eigen::MatrixXd apply_A(const StiefelPoint& X, const Eigen::MatrixXd& V);

// A*(Lambda) = 2 X Lambda for symmetric Lambda
Eigen::MatrixXd apply_A_adjoint(const StiefelPoint& X, const Eigen::MatrixXd& Lambda);

// B(Lambda) = X - t*(egrad - A*(Lambda))
Eigen::MatrixXd compute_B(const SubproblemInstance& inst, const PackedMultiplier& Lambda);

// V(Lambda) = prox_{th}(B(Lambda)) - X
Eigen::MatrixXd compute_V(const SubproblemInstance& inst, const PackedMultiplier& Lambda);

// E(Lambda) = A(V(Lambda)), symmetric r x r
Eigen::MatrixXd residual_E(const SubproblemInstance& inst, const PackedMultiplier& Lambda);

// Subproblem objective g(V); used by line-search and property tests.
double subproblem_objective(const SubproblemInstance& inst, const Eigen::MatrixXd& V);

// Generalized Jacobian of packed E at Lambda. `packed` acts on plain packed
// coordinates and matches directional finite differences of packed E. The
// operator is self-adjoint PSD under the duplication-weighted inner product;
// `scaled_symmetric` is its similarity transform D G D^{-1} (D = sqrt of the
// duplication weights), which is symmetric PSD and is what the Newton solve
// factorizes.
struct SsnJacobian {
  Eigen::MatrixXd packed;
  Eigen::VectorXd sqrt_w;

  Eigen::MatrixXd scaled_symmetric() const;
};

SsnJacobian jacobian_G(const SubproblemInstance& inst, const PackedMultiplier& Lambda);

// Solve (G + eta I) d = -e_packed. Dense LU when the system is small,
// otherwise CG on the scaled symmetric form. Throws on breakdown.
Eigen::VectorXd newton_direction(const SsnJacobian& G, const Eigen::VectorXd& e_packed,
                                 double eta, Eigen::Index dense_threshold = 200);

SsnResult ssn_solve(const SubproblemInstance& inst, const PackedMultiplier& Lambda0,
                    const SsnConfig& cfg);

}  // namespace manpg

#endif  // MANPG_SSN_HPP
