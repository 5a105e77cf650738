#include "manpg/problems.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace manpg {

Eigen::MatrixXd ProblemOracle::euclidean_subgradient(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd g = eval_grad_f(X);
  const NonsmoothTerm& h = term();
  double w = h.prox_weight();
  if (w == 0.0) return g;
  if (h.kind == NonsmoothTerm::Kind::L21) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      double nrm = X.row(i).norm();
      if (nrm > 0.0) g.row(i) += (w / nrm) * X.row(i);
    }
    return g;
  }
  return g + w * X.unaryExpr([](double x) {
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  });
}

void SpcaProblem::finalize() {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  double s = svd.singularValues()(0);
  sigma2_max = s * s;
}

void CmProblem::finalize() {
  if (lambda_max > 0.0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  lambda_max = es.eigenvalues().maxCoeff();
}

void McpSpcaProblem::finalize() {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  double s = svd.singularValues()(0);
  sigma2_max = s * s;
}

SpcaProblem gen_spca(Eigen::Index m, Eigen::Index n, std::uint64_t seed, double mu) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_spca: m, n must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd A = rng.normal_matrix(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    A.col(j).array() -= A.col(j).mean();
    double nrm = A.col(j).norm();
    if (nrm > 0.0) A.col(j) /= nrm;
  }
  SpcaProblem p;
  p.A = std::move(A);
  p.mu = mu;
  p.finalize();
  return p;
}

CmProblem build_fe_hamiltonian(Eigen::Index n, double mu) {
  if (n < 3) throw std::invalid_argument("build_fe_hamiltonian: n must be >= 3");
  double h = 50.0 / static_cast<double>(n);
  double diag = 1.0 / (h * h);
  double off = -0.5 / (h * h);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    H(i, i) = diag;
    H(i, (i + 1) % n) = off;
    H(i, (i + n - 1) % n) = off;
  }
  CmProblem p;
  p.H = std::move(H);
  p.mu = mu;
  // closed-form circulant eigenvalues (1/h^2)(1 - cos(2 pi k / n))
  double lmax = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    lmax = std::max(lmax, (1.0 - std::cos(2.0 * M_PI * k / n)) / (h * h));
  p.lambda_max = lmax;
  return p;
}

double sparsity(const Eigen::MatrixXd& X, double threshold) {
  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      if (std::abs(X(i, j)) < threshold) ++count;
  return static_cast<double>(count) / static_cast<double>(X.size());
}

namespace {

class SpcaOracle final : public ProblemOracle {
 public:
  SpcaOracle(SpcaProblem p) : p_(std::move(p)), term_(NonsmoothTerm::l1(p_.mu)) {
    if (p_.sigma2_max <= 0.0) p_.finalize();
  }
  double eval_f(const Eigen::MatrixXd& X) const override {
    return -(p_.A * X).squaredNorm();
  }
  Eigen::MatrixXd eval_grad_f(const Eigen::MatrixXd& X) const override {
    return -2.0 * (p_.A.transpose() * (p_.A * X));
  }
  const NonsmoothTerm& term() const override { return term_; }
  double lipschitz() const override { return 2.0 * p_.sigma2_max; }

 private:
  SpcaProblem p_;
  NonsmoothTerm term_;
};

class CmOracle final : public ProblemOracle {
 public:
  CmOracle(CmProblem p) : p_(std::move(p)), term_(NonsmoothTerm::l1(p_.mu)) {
    p_.finalize();
  }
  double eval_f(const Eigen::MatrixXd& X) const override {
    return (X.array() * (p_.H * X).array()).sum();
  }
  Eigen::MatrixXd eval_grad_f(const Eigen::MatrixXd& X) const override {
    return 2.0 * (p_.H * X);
  }
  const NonsmoothTerm& term() const override { return term_; }
  double lipschitz() const override { return 2.0 * p_.lambda_max; }

 private:
  CmProblem p_;
  NonsmoothTerm term_;
};

class McpSpcaOracle final : public ProblemOracle {
 public:
  McpSpcaOracle(McpSpcaProblem p)
      : p_(std::move(p)),
        term_(NonsmoothTerm::mcp_split(p_.mu, p_.lambda, p_.gamma, p_.lambda_slope)) {
    if (p_.sigma2_max <= 0.0) p_.finalize();
  }
  double eval_f(const Eigen::MatrixXd& X) const override {
    return -(p_.A * X).squaredNorm() + mcp_smooth_eval(term_, X);
  }
  Eigen::MatrixXd eval_grad_f(const Eigen::MatrixXd& X) const override {
    return -2.0 * (p_.A.transpose() * (p_.A * X)) + mcp_smooth_grad(term_, X);
  }
  const NonsmoothTerm& term() const override { return term_; }
  double lipschitz() const override {
    double inner = p_.lambda_slope ? p_.lambda : p_.gamma;
    return 2.0 * p_.sigma2_max + p_.mu / inner;
  }

 private:
  McpSpcaProblem p_;
  NonsmoothTerm term_;
};

}  // namespace

std::unique_ptr<ProblemOracle> make_oracle(const SpcaProblem& p) {
  return std::make_unique<SpcaOracle>(p);
}
std::unique_ptr<ProblemOracle> make_oracle(const CmProblem& p) {
  return std::make_unique<CmOracle>(p);
}
std::unique_ptr<ProblemOracle> make_oracle(const McpSpcaProblem& p) {
  return std::make_unique<McpSpcaOracle>(p);
}

void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& M) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_matrix_csv: cannot open " + path);
  out << M.rows() << "," << M.cols() << "\n";
  char buf[32];
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", M(i, j));
      out << buf << (j + 1 < M.cols() ? "," : "");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("save_matrix_csv: write failed for " + path);
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_matrix_csv: empty file");
  Eigen::Index rows = 0, cols = 0;
  {
    std::istringstream hs(line);
    char comma;
    if (!(hs >> rows >> comma >> cols) || comma != ',')
      throw std::runtime_error("load_matrix_csv: bad header in " + path);
  }
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("load_matrix_csv: truncated file");
    std::istringstream ls(line);
    std::string cell;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!std::getline(ls, cell, ',')) throw std::runtime_error("load_matrix_csv: short row");
      M(i, j) = std::stod(cell);
    }
  }
  return M;
}

}  // namespace manpg
