#pragma once

#include <Eigen/Eigenvalues>

#include "dirstat/error.hpp"
#include "dirstat/types.hpp"

namespace dirstat {

// Weighted second-moment matrix S = sum_i w_i x_i x_i^T / sum_i w_i.
// trace(S) = 1 for unit-norm rows.
struct ScatterMatrix {
  Matrix S;
  double weight = 0.0;
};

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // column k pairs with values(k)
};

inline SymmetricEigen symmetric_eigs(const Matrix& S) {
  if (S.rows() != S.cols()) throw domain_error("symmetric_eigs: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S);
  if (solver.info() != Eigen::Success) throw numerical_error("symmetric_eigs: eigensolver did not converge");
  const Eigen::Index p = S.rows();
  SymmetricEigen out{Vector(p), Matrix(p, p)};
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < p; ++k) {
    out.values(k) = solver.eigenvalues()(p - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(p - 1 - k);
  }
  return out;
}

inline SymmetricEigen symmetric_eigs(const ScatterMatrix& scatter) { return symmetric_eigs(scatter.S); }

// Weighted scatter of the rows of data; weights must be non-negative with a
// positive sum.
inline ScatterMatrix weighted_scatter(const Dataset& data, const Eigen::Ref<const Vector>& weights) {
  if (weights.size() != data.rows()) throw data_error("weighted_scatter: weight count does not match rows");
  const double total = weights.sum();
  if (!(total > 0.0)) throw data_error("weighted_scatter: total weight must be positive");
  const Dataset weighted = data.array().colwise() * weights.array();
  Matrix S = weighted.transpose() * data;
  S /= total;
  S = 0.5 * (S + S.transpose()).eval();
  return {std::move(S), total};
}

inline ScatterMatrix scatter(const Dataset& data) {
  return weighted_scatter(data, Vector::Ones(data.rows()));
}

}  // namespace dirstat
