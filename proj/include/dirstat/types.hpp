#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "dirstat/error.hpp"

namespace dirstat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// n points of dimension p, one point per row.
using Dataset = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kUnitTolerance = 1e-9;

// A point on S^{p-1}. Construction checks the norm; use normalized() to
// project an arbitrary nonzero vector.
class UnitVector {
 public:
  explicit UnitVector(Vector coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) {
      throw domain_error("unit vector needs dimension >= 2");
    }
    if (!coords_.allFinite() || std::abs(coords_.norm() - 1.0) > kUnitTolerance) {
      throw domain_error("vector is not unit norm (|x| = " + std::to_string(coords_.norm()) + ")");
    }
  }

  static UnitVector normalized(const Vector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw domain_error("cannot normalize a zero or non-finite vector");
    }
    return UnitVector(v / n);
  }

  static UnitVector basis(Eigen::Index dim, Eigen::Index axis) {
    Vector e = Vector::Zero(dim);
    e(axis) = 1.0;
    return UnitVector(std::move(e));
  }

  const Vector& coords() const noexcept { return coords_; }
  Eigen::Index dim() const noexcept { return coords_.size(); }
  double operator()(Eigen::Index i) const { return coords_(i); }

  UnitVector operator-() const { return UnitVector(Vector(-coords_)); }

 private:
  Vector coords_;
};

struct VmfParams {
  UnitVector mu;
  double kappa;
};

// (mu, kappa) and (-mu, kappa) denote the same distribution.
struct WatsonParams {
  UnitVector mu;
  double kappa;
};

// Throws data_error unless every row has unit norm within tol.
inline void require_unit_rows(const Dataset& data, double tol = kUnitTolerance) {
  if (data.rows() < 1) throw data_error("dataset is empty");
  if (data.cols() < 2) throw data_error("dataset dimension must be >= 2");
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double n = data.row(i).norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > tol) {
      throw data_error("row " + std::to_string(i) + " is not unit norm (|x| = " + std::to_string(n) + ")");
    }
  }
}

}  // namespace dirstat
