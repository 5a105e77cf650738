#ifndef MANPG_PROX_HPP
#define MANPG_PROX_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace manpg {

// Nonsmooth part h of the objective. For McpSplitL1 the prox-handled part
// is mu*lambda*||X||_1; the smooth remainder is exposed through
// mcp_smooth_grad and folded into f by the problem oracle.
struct NonsmoothTerm {
  enum class Kind { L1, L21, McpSplitL1 };

  Kind kind = Kind::L1;
  double mu = 1.0;
  double lambda = 1.0;  // MCP only
  double gamma = 1.0;   // MCP only
  // Use x^2/(2*lambda) on the inner MCP branch instead of the standard
  // x^2/(2*gamma); the two coincide when gamma == lambda.
  bool mcp_lambda_slope = false;

  static NonsmoothTerm l1(double mu) { return {Kind::L1, mu, 1.0, 1.0, false}; }
  static NonsmoothTerm l21(double mu) { return {Kind::L21, mu, 1.0, 1.0, false}; }
  static NonsmoothTerm mcp_split(double mu, double lambda, double gamma,
                                 bool lambda_slope = false) {
    return {Kind::McpSplitL1, mu, lambda, gamma, lambda_slope};
  }

  // effective L1 weight seen by the prox
  double prox_weight() const {
    return kind == Kind::McpSplitL1 ? mu * lambda : mu;
  }

  void validate() const {
    // mu == 0 is admitted and means h vanishes (smooth problem)
    if (mu < 0.0) throw std::invalid_argument("NonsmoothTerm: mu must be >= 0");
    if (kind == Kind::McpSplitL1 && (lambda <= 0.0 || gamma <= 0.0))
      throw std::invalid_argument("NonsmoothTerm: MCP needs lambda, gamma > 0");
  }
};

// Element of the Clarke generalized Jacobian of prox_{th} at a point.
// For L1 terms a 0/1 mask; for L21 a per-row r x r block. Symmetric PSD
// with eigenvalues in [0,1] as a linear map.
struct ProxJacobian {
  NonsmoothTerm::Kind kind;
  Eigen::MatrixXd mask;                       // L1 / McpSplitL1
  std::vector<Eigen::MatrixXd> row_blocks;    // L21

  Eigen::MatrixXd apply(const Eigen::MatrixXd& D) const;
};

double h_eval(const NonsmoothTerm& term, const Eigen::MatrixXd& X);

Eigen::MatrixXd prox_eval(const NonsmoothTerm& term, double t, const Eigen::MatrixXd& Y);

ProxJacobian prox_jacobian(const NonsmoothTerm& term, double t, const Eigen::MatrixXd& Y);

// Gradient of the smooth MCP remainder mu*(sum P(x) - lambda*|x|):
// entrywise -mu*x/gamma on |x| <= gamma*lambda, else -mu*lambda*sign(x).
Eigen::MatrixXd mcp_smooth_grad(const NonsmoothTerm& term, const Eigen::MatrixXd& X);

// Value of the smooth MCP remainder (used by oracles and tests).
double mcp_smooth_eval(const NonsmoothTerm& term, const Eigen::MatrixXd& X);

}  // namespace manpg

#endif  // MANPG_PROX_HPP
