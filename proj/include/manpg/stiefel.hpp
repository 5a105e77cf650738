#ifndef MANPG_STIEFEL_HPP
#define MANPG_STIEFEL_HPP

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "manpg/rng.hpp"

namespace manpg {

enum class RetractionKind { Exponential, Polar, QR, Cayley };

constexpr double kFeasibilityTol = 1e-12;

class RetractionError : public std::runtime_error {
 public:
  explicit RetractionError(const std::string& what) : std::runtime_error(what) {}
};

// Point on St(n,r): dense n x r matrix with orthonormal columns.
class StiefelPoint {
 public:
  StiefelPoint(Eigen::MatrixXd data, double tol = kFeasibilityTol);

  const Eigen::MatrixXd& matrix() const { return data_; }
  Eigen::Index n() const { return data_.rows(); }
  Eigen::Index r() const { return data_.cols(); }

  double feasibility_error() const;

  // Nearest Stiefel point (polar factor); used to absorb drift in long runs.
  StiefelPoint reorthonormalized() const;

 private:
  Eigen::MatrixXd data_;
};

// Tangent vector at a base point: V with V'X + X'V = 0.
struct TangentVector {
  Eigen::MatrixXd data;

  double norm() const { return data.norm(); }
};

double tangent_defect(const StiefelPoint& X, const Eigen::MatrixXd& V);

// Proj_{T_X}(Y) = Y - X sym(X'Y)
TangentVector tangent_project(const StiefelPoint& X, const Eigen::MatrixXd& Y);

TangentVector riemannian_gradient(const StiefelPoint& X, const Eigen::MatrixXd& egrad);

StiefelPoint retract(const StiefelPoint& X, const Eigen::MatrixXd& xi,
                     RetractionKind kind = RetractionKind::Polar);

inline StiefelPoint retract(const StiefelPoint& X, const TangentVector& xi,
                            RetractionKind kind = RetractionKind::Polar) {
  return retract(X, xi.data, kind);
}

// || X X' - Y Y' ||_F ; invariant under right rotation of either argument.
double subspace_distance(const StiefelPoint& X, const StiefelPoint& Y);

// Orthogonal projection of an arbitrary matrix onto St(n,r) via SVD (U I V').
StiefelPoint project_to_stiefel(const Eigen::MatrixXd& Y);

StiefelPoint random_stiefel(Eigen::Index n, Eigen::Index r, Rng& rng);

}  // namespace manpg

#endif  // MANPG_STIEFEL_HPP
