#include "manpg/prox.hpp"

#include <cmath>

namespace manpg {

Eigen::MatrixXd ProxJacobian::apply(const Eigen::MatrixXd& D) const {
  if (kind == NonsmoothTerm::Kind::L21) {
    Eigen::MatrixXd out(D.rows(), D.cols());
    for (Eigen::Index i = 0; i < D.rows(); ++i)
      out.row(i) = D.row(i) * row_blocks[static_cast<std::size_t>(i)].transpose();
    return out;
  }
  return mask.cwiseProduct(D);
}

double h_eval(const NonsmoothTerm& term, const Eigen::MatrixXd& X) {
  term.validate();
  switch (term.kind) {
    case NonsmoothTerm::Kind::L1:
      return term.mu * X.cwiseAbs().sum();
    case NonsmoothTerm::Kind::L21:
      return term.mu * X.rowwise().norm().sum();
    case NonsmoothTerm::Kind::McpSplitL1:
      return term.mu * term.lambda * X.cwiseAbs().sum();
  }
  return 0.0;
}

Eigen::MatrixXd prox_eval(const NonsmoothTerm& term, double t, const Eigen::MatrixXd& Y) {
  term.validate();
  if (t <= 0.0) throw std::invalid_argument("prox_eval: t must be > 0");
  double w = t * term.prox_weight();
  if (term.kind == NonsmoothTerm::Kind::L21) {
    Eigen::MatrixXd out(Y.rows(), Y.cols());
    for (Eigen::Index i = 0; i < Y.rows(); ++i) {
      double nrm = Y.row(i).norm();
      double scale = nrm > w ? 1.0 - w / nrm : 0.0;
      out.row(i) = scale * Y.row(i);
    }
    return out;
  }
  // entrywise soft threshold
  return Y.unaryExpr([w](double y) {
    double m = std::abs(y) - w;
    return m > 0.0 ? (y > 0.0 ? m : -m) : 0.0;
  });
}

ProxJacobian prox_jacobian(const NonsmoothTerm& term, double t, const Eigen::MatrixXd& Y) {
  term.validate();
  if (t <= 0.0) throw std::invalid_argument("prox_jacobian: t must be > 0");
  double w = t * term.prox_weight();
  ProxJacobian J;
  J.kind = term.kind;
  if (term.kind == NonsmoothTerm::Kind::L21) {
    Eigen::Index r = Y.cols();
    J.row_blocks.reserve(static_cast<std::size_t>(Y.rows()));
    for (Eigen::Index i = 0; i < Y.rows(); ++i) {
      double nrm = Y.row(i).norm();
      if (nrm <= w) {
        // at or inside the kink: take the zero Clarke element
        J.row_blocks.emplace_back(Eigen::MatrixXd::Zero(r, r));
      } else {
        Eigen::VectorXd v = Y.row(i).transpose();
        Eigen::MatrixXd B = (1.0 - w / nrm) * Eigen::MatrixXd::Identity(r, r) +
                            (w / (nrm * nrm * nrm)) * v * v.transpose();
        J.row_blocks.emplace_back(std::move(B));
      }
    }
  } else {
    // strict inequality: at |y| == w the smaller (zero) element is chosen
    J.mask = Y.unaryExpr([w](double y) { return std::abs(y) > w ? 1.0 : 0.0; });
  }
  return J;
}

Eigen::MatrixXd mcp_smooth_grad(const NonsmoothTerm& term, const Eigen::MatrixXd& X) {
  term.validate();
  if (term.kind != NonsmoothTerm::Kind::McpSplitL1)
    throw std::invalid_argument("mcp_smooth_grad: term is not McpSplitL1");
  double mu = term.mu, lam = term.lambda, gam = term.gamma;
  double knee = gam * lam;
  double inner_slope = term.mcp_lambda_slope ? 1.0 / lam : 1.0 / gam;
  return X.unaryExpr([=](double x) {
    if (std::abs(x) <= knee) return -mu * inner_slope * x;
    return -mu * lam * (x > 0.0 ? 1.0 : -1.0);
  });
}

double mcp_smooth_eval(const NonsmoothTerm& term, const Eigen::MatrixXd& X) {
  term.validate();
  if (term.kind != NonsmoothTerm::Kind::McpSplitL1)
    throw std::invalid_argument("mcp_smooth_eval: term is not McpSplitL1");
  double mu = term.mu, lam = term.lambda, gam = term.gamma;
  double knee = gam * lam;
  double denom = term.mcp_lambda_slope ? lam : gam;
  double s = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      double x = X(i, j);
      if (std::abs(x) <= knee)
        s += -x * x / (2.0 * denom);
      else
        s += 0.5 * gam * lam * lam - lam * std::abs(x);
    }
  return mu * s;
}

}  // namespace manpg
