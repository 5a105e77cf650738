#include "manpg/stiefel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace manpg {

namespace {

void check_shapes(const StiefelPoint& X, const Eigen::MatrixXd& Y) {
  if (Y.rows() != X.n() || Y.cols() != X.r())
    throw std::invalid_argument("shape mismatch: expected " +
                                std::to_string(X.n()) + "x" + std::to_string(X.r()));
}

// Inverse square root of the SPD matrix I + S via its eigendecomposition.
Eigen::MatrixXd inv_sqrt_spd(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  Eigen::VectorXd d = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// Thin QR with the R diagonal forced positive, so qf() is unique.
void thin_qr_positive(const Eigen::MatrixXd& A, Eigen::MatrixXd* Q, Eigen::MatrixXd* R) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::Index r = A.cols();
  Eigen::MatrixXd Qfull = qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), r);
  Eigen::MatrixXd Rfull = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < r; ++j) {
    if (Rfull(j, j) < 0.0) {
      Rfull.row(j) = -Rfull.row(j);
      Qfull.col(j) = -Qfull.col(j);
    }
  }
  *Q = std::move(Qfull);
  *R = std::move(Rfull);
}

}  // namespace

StiefelPoint::StiefelPoint(Eigen::MatrixXd data, double tol) : data_(std::move(data)) {
  if (data_.rows() < data_.cols())
    throw std::invalid_argument("StiefelPoint requires r <= n");
  Eigen::Index r = data_.cols();
  double err = (data_.transpose() * data_ - Eigen::MatrixXd::Identity(r, r)).norm();
  if (err > 1e-10) {
    // re-orthonormalize via the polar factor, then re-check
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(data_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    data_ = svd.matrixU() * svd.matrixV().transpose();
    err = (data_.transpose() * data_ - Eigen::MatrixXd::Identity(r, r)).norm();
  }
  if (err > std::max(tol, 1e-10))
    throw std::invalid_argument("matrix is not feasible on St(n,r)");
}

double StiefelPoint::feasibility_error() const {
  Eigen::Index r = data_.cols();
  return (data_.transpose() * data_ - Eigen::MatrixXd::Identity(r, r)).norm();
}

StiefelPoint StiefelPoint::reorthonormalized() const {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(data_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return StiefelPoint(svd.matrixU() * svd.matrixV().transpose());
}

double tangent_defect(const StiefelPoint& X, const Eigen::MatrixXd& V) {
  return (V.transpose() * X.matrix() + X.matrix().transpose() * V).norm();
}

TangentVector tangent_project(const StiefelPoint& X, const Eigen::MatrixXd& Y) {
  check_shapes(X, Y);
  const Eigen::MatrixXd& Xm = X.matrix();
  Eigen::MatrixXd XtY = Xm.transpose() * Y;
  Eigen::MatrixXd sym = 0.5 * (XtY + XtY.transpose());
  return TangentVector{Y - Xm * sym};
}

TangentVector riemannian_gradient(const StiefelPoint& X, const Eigen::MatrixXd& egrad) {
  return tangent_project(X, egrad);
}

StiefelPoint retract(const StiefelPoint& X, const Eigen::MatrixXd& xi, RetractionKind kind) {
  check_shapes(X, xi);
  if (xi.isZero(0.0)) return X;
  const Eigen::MatrixXd& Xm = X.matrix();
  Eigen::Index n = X.n(), r = X.r();

  switch (kind) {
    case RetractionKind::Polar: {
      Eigen::MatrixXd Y = Xm + xi;
      Eigen::MatrixXd M = Eigen::MatrixXd::Identity(r, r) + xi.transpose() * xi;
      return StiefelPoint(Y * inv_sqrt_spd(M));
    }
    case RetractionKind::QR: {
      Eigen::MatrixXd Q, R;
      thin_qr_positive(Xm + xi, &Q, &R);
      for (Eigen::Index j = 0; j < r; ++j)
        if (R(j, j) < 1e-12 * std::max(1.0, (Xm + xi).norm()))
          throw RetractionError("QR retraction: X + xi is rank deficient");
      return StiefelPoint(Q);
    }
    case RetractionKind::Cayley: {
      Eigen::MatrixXd Px = Eigen::MatrixXd::Identity(n, n) - 0.5 * Xm * Xm.transpose();
      Eigen::MatrixXd W = Px * xi * Xm.transpose() - Xm * xi.transpose() * Px;
      Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - 0.5 * W;
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
      double rcond_proxy = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
      if (rcond_proxy < 1e-14 * std::max(1.0, A.norm()))
        throw RetractionError("Cayley retraction: I - W/2 is numerically singular");
      Eigen::MatrixXd Y = lu.solve((Eigen::MatrixXd::Identity(n, n) + 0.5 * W) * Xm);
      return StiefelPoint(Y);
    }
    case RetractionKind::Exponential: {
      // [X,Q] expm([ X'xi  -R' ; R  0 ]) [I;0] with QR = (I-XX')xi
      Eigen::MatrixXd A = xi - Xm * (Xm.transpose() * xi);
      Eigen::MatrixXd Q, R;
      thin_qr_positive(A, &Q, &R);
      Eigen::MatrixXd M(2 * r, 2 * r);
      M.topLeftCorner(r, r) = Xm.transpose() * xi;
      M.topRightCorner(r, r) = -R.transpose();
      M.bottomLeftCorner(r, r) = R;
      M.bottomRightCorner(r, r).setZero();
      Eigen::MatrixXd E = M.exp();
      Eigen::MatrixXd Y = Xm * E.topLeftCorner(r, r) + Q * E.bottomLeftCorner(r, r);
      return StiefelPoint(Y);
    }
  }
  throw std::logic_error("unreachable retraction kind");
}

double subspace_distance(const StiefelPoint& X, const StiefelPoint& Y) {
  if (X.n() != Y.n() || X.r() != Y.r())
    throw std::invalid_argument("subspace_distance: shape mismatch");
  const Eigen::MatrixXd& A = X.matrix();
  const Eigen::MatrixXd& B = Y.matrix();
  // ||AA' - BB'||_F^2 = 2r - 2||A'B||_F^2 ; avoids forming n x n products
  double cross = (A.transpose() * B).squaredNorm();
  double d2 = 2.0 * static_cast<double>(X.r()) - 2.0 * cross;
  return std::sqrt(std::max(0.0, d2));
}

StiefelPoint project_to_stiefel(const Eigen::MatrixXd& Y) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return StiefelPoint(svd.matrixU() * svd.matrixV().transpose());
}

StiefelPoint random_stiefel(Eigen::Index n, Eigen::Index r, Rng& rng) {
  return project_to_stiefel(rng.normal_matrix(n, r));
}

}  // namespace manpg
