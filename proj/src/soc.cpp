#include "manpg/soc.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace manpg {

namespace {

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& Y, double w) {
  return Y.unaryExpr([w](double y) {
    double m = std::abs(y) - w;
    return m > 0.0 ? (y > 0.0 ? m : -m) : 0.0;
  });
}

bool is_circulant(const Eigen::MatrixXd& H, double tol = 1e-12) {
  Eigen::Index n = H.rows();
  if (H.cols() != n) return false;
  double scale = std::max(1.0, H.norm());
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(H(i, j) - H(0, (j - i + n) % n)) > tol * scale) return false;
  return true;
}

// Q, X and dual sweeps shared by both problems; P has already been updated.
void finish_sweep(SocState& s, double mu) {
  s.Q = soft_threshold(s.P + s.Lam, mu / s.beta);
  s.X = project_to_stiefel(s.P + s.Gam).matrix();
  s.Lam += s.P - s.Q;
  s.Gam += s.P - s.X;
}

}  // namespace

SocState SocState::from_point(const StiefelPoint& X0, double beta) {
  SocState s;
  s.P = X0.matrix();
  s.Q = X0.matrix();
  s.X = X0.matrix();
  s.Lam = Eigen::MatrixXd::Zero(X0.n(), X0.r());
  s.Gam = Eigen::MatrixXd::Zero(X0.n(), X0.r());
  s.beta = beta;
  return s;
}

double feasibility_residual(const SocState& s) {
  double qp = (s.Q - s.P).norm() / std::max({1.0, s.Q.norm(), s.P.norm()});
  double xp = (s.X - s.P).norm() / std::max({1.0, s.X.norm(), s.P.norm()});
  return qp + xp;
}

void soc_step_cm(SocState& s, const Eigen::MatrixXd& H, double mu) {
  Eigen::Index n = H.rows();
  Eigen::MatrixXd M = 2.0 * H + 2.0 * s.beta * Eigen::MatrixXd::Identity(n, n);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("soc_step_cm: singular P-system");
  Eigen::MatrixXd rhs = s.beta * (s.Q - s.Lam) + s.beta * (s.X - s.Gam);
  s.P = ldlt.solve(rhs);
  finish_sweep(s, mu);
}

void soc_step_spca(SocState& s, const Eigen::MatrixXd& A, double mu) {
  Eigen::Index n = A.cols();
  Eigen::MatrixXd M = 2.0 * s.beta * Eigen::MatrixXd::Identity(n, n) -
                      2.0 * A.transpose() * A;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("soc_step_spca: P-system is not positive definite");
  Eigen::MatrixXd rhs = s.beta * (s.Q - s.Lam) + s.beta * (s.X - s.Gam);
  s.P = llt.solve(rhs);
  finish_sweep(s, mu);
}

SocCmSolver::SocCmSolver(const Eigen::MatrixXd& H, double mu, double beta)
    : H_(H), mu_(mu), beta_(beta) {
  if (beta_ <= 0.0) throw std::invalid_argument("SocCmSolver: beta must be > 0");
  Eigen::Index n = H.rows();
  circulant_ = is_circulant(H);
  if (circulant_) {
    Eigen::VectorXd first = 2.0 * H.col(0);
    first(0) += 2.0 * beta_;
    Eigen::FFT<double> fft;
    std::vector<double> in(first.data(), first.data() + n);
    std::vector<std::complex<double>> freq;
    fft.fwd(freq, in);
    system_eigs_ = Eigen::Map<Eigen::VectorXcd>(freq.data(), n);
    if (system_eigs_.real().minCoeff() <= 0.0)
      throw std::invalid_argument("SocCmSolver: 2H + 2 beta I is not positive definite");
  } else {
    Eigen::MatrixXd M = 2.0 * H + 2.0 * beta_ * Eigen::MatrixXd::Identity(n, n);
    dense_.compute(M);
    if (dense_.info() != Eigen::Success)
      throw std::invalid_argument("SocCmSolver: failed to factor the P-system");
  }
}

Eigen::MatrixXd SocCmSolver::solve_p_system(const Eigen::MatrixXd& rhs) const {
  if (!circulant_) return dense_.solve(rhs);
  Eigen::Index n = rhs.rows();
  Eigen::MatrixXd out(n, rhs.cols());
  Eigen::FFT<double> fft;
  std::vector<double> col(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> freq;
  for (Eigen::Index j = 0; j < rhs.cols(); ++j) {
    Eigen::Map<Eigen::VectorXd>(col.data(), n) = rhs.col(j);
    fft.fwd(freq, col);
    for (Eigen::Index k = 0; k < n; ++k) freq[static_cast<std::size_t>(k)] /= system_eigs_(k);
    fft.inv(col, freq);
    out.col(j) = Eigen::Map<Eigen::VectorXd>(col.data(), n);
  }
  return out;
}

void SocCmSolver::step(SocState& s) const {
  Eigen::MatrixXd rhs = s.beta * (s.Q - s.Lam) + s.beta * (s.X - s.Gam);
  s.P = solve_p_system(rhs);
  finish_sweep(s, mu_);
}

double SocCmSolver::objective(const Eigen::MatrixXd& X) const {
  return (X.array() * (H_ * X).array()).sum() + mu_ * X.cwiseAbs().sum();
}

SocSpcaSolver::SocSpcaSolver(const Eigen::MatrixXd& A, double mu, double beta)
    : A_(A), mu_(mu), beta_(beta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A);
  double lmax = es.eigenvalues().maxCoeff();
  if (beta_ <= 0.0) beta_ = 2.0 * lmax * (1.0 + 1e-8);
  Eigen::VectorXd sys = (2.0 * beta_ - 2.0 * es.eigenvalues().array()).matrix();
  if (sys.minCoeff() <= 0.0)
    throw std::invalid_argument("SocSpcaSolver: 2 beta I - 2A'A is not positive definite");
  evecs_ = es.eigenvectors();
  inv_eigs_ = sys.cwiseInverse();
}

void SocSpcaSolver::step(SocState& s) const {
  Eigen::MatrixXd rhs = s.beta * (s.Q - s.Lam) + s.beta * (s.X - s.Gam);
  s.P = evecs_ * (inv_eigs_.asDiagonal() * (evecs_.transpose() * rhs));
  finish_sweep(s, mu_);
}

double SocSpcaSolver::objective(const Eigen::MatrixXd& X) const {
  return -(A_ * X).squaredNorm() + mu_ * X.cwiseAbs().sum();
}

template <class Stepper>
SocResult soc_run(const Stepper& stepper, const StiefelPoint& X0, double f_target,
                  int max_iter, double feas_tol) {
  SocState s = SocState::from_point(X0, stepper.beta());
  bool standalone = !std::isfinite(f_target);
  int k = 0;
  bool converged = false;
  double feas = feasibility_residual(s);
  for (; k < max_iter; ++k) {
    stepper.step(s);
    feas = feasibility_residual(s);
    if (feas <= feas_tol) {
      if (standalone || stepper.objective(s.X) <= f_target + 1e-7) {
        ++k;
        converged = true;
        break;
      }
    }
  }
  SocResult out{project_to_stiefel(s.X)};
  out.F = stepper.objective(out.X.matrix());
  out.iterations = k;
  out.feasibility = feas;
  out.converged = converged;
  out.standalone = standalone;
  return out;
}

template SocResult soc_run<SocCmSolver>(const SocCmSolver&, const StiefelPoint&, double, int,
                                        double);
template SocResult soc_run<SocSpcaSolver>(const SocSpcaSolver&, const StiefelPoint&, double,
                                          int, double);

}  // namespace manpg
