#ifndef MANPG_PROBLEMS_HPP
#define MANPG_PROBLEMS_HPP

#include <memory>
#include <string>

#include <Eigen/Dense>

#include "manpg/prox.hpp"
#include "manpg/rng.hpp"

namespace manpg {

// Interface a solver needs from a concrete problem: smooth value/gradient,
// the nonsmooth term, a Lipschitz bound for the gradient, and a subgradient
// selection for the Riemannian subgradient baseline.
class ProblemOracle {
 public:
  virtual ~ProblemOracle() = default;

  virtual double eval_f(const Eigen::MatrixXd& X) const = 0;
  virtual Eigen::MatrixXd eval_grad_f(const Eigen::MatrixXd& X) const = 0;
  virtual const NonsmoothTerm& term() const = 0;
  virtual double lipschitz() const = 0;

  // grad f + w * sign(X) with sign(0) = 0 for L1-type terms;
  // rowwise v/||v|| selection for L21.
  virtual Eigen::MatrixXd euclidean_subgradient(const Eigen::MatrixXd& X) const;

  double eval_h(const Eigen::MatrixXd& X) const {
    return term().prox_weight() == 0.0 ? 0.0 : h_eval(term(), X);
  }
  double eval_F(const Eigen::MatrixXd& X) const { return eval_f(X) + eval_h(X); }
};

// Sparse PCA:  min -Tr(X'A'AX) + mu ||X||_1  over St(n,r).  L = 2 sigma_max(A)^2.
struct SpcaProblem {
  Eigen::MatrixXd A;
  double mu = 0.0;
  double sigma2_max = 0.0;  // filled by finalize()

  void finalize();
};

// Compressed modes:  min Tr(X'HX) + mu ||X||_1.  For the 1D FE Hamiltonian on
// [0,50], lambda_max(H) <= 2n^2/50^2 and L = 2 lambda_max.
struct CmProblem {
  Eigen::MatrixXd H;
  double mu = 0.0;
  double lambda_max = 0.0;

  void finalize();  // computes lambda_max if not set
};

// MCP-regularized sparse PCA (smooth remainder folded into f).
struct McpSpcaProblem {
  Eigen::MatrixXd A;
  double mu = 0.0;
  double lambda = 1.0;
  double gamma = 1.0;
  bool lambda_slope = false;
  double sigma2_max = 0.0;

  void finalize();
};

// Standard-normal A with columns centered to mean zero and normalized to unit
// Euclidean norm; deterministic per seed.
SpcaProblem gen_spca(Eigen::Index m, Eigen::Index n, std::uint64_t seed, double mu = 0.0);

// 3-point-stencil circulant discretization of -(1/2) d^2/dx^2 on [0,50] with
// periodic boundary, n equally spaced nodes.
CmProblem build_fe_hamiltonian(Eigen::Index n, double mu = 0.0);

// Fraction of entries with |x| < threshold (strict).
double sparsity(const Eigen::MatrixXd& X, double threshold = 1e-5);

std::unique_ptr<ProblemOracle> make_oracle(const SpcaProblem& p);
std::unique_ptr<ProblemOracle> make_oracle(const CmProblem& p);
std::unique_ptr<ProblemOracle> make_oracle(const McpSpcaProblem& p);

// CSV matrix exchange; header line "rows,cols", then row-major values.
void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& M);
Eigen::MatrixXd load_matrix_csv(const std::string& path);

}  // namespace manpg

#endif  // MANPG_PROBLEMS_HPP
