#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace thermalign::detail {

/// Minimum-norm solution of the symmetric normal equations A x = b;
/// directions with eigenvalues below `rel_tol * max eigenvalue` are dropped.
inline Eigen::Matrix<double, 6, 1> solve_normal_equations(const Eigen::Matrix<double, 6, 6>& a,
                                                          const Eigen::Matrix<double, 6, 1>& b,
                                                          double rel_tol = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> eig(a);
  const auto& values = eig.eigenvalues();
  const double cutoff = rel_tol * std::max(values.cwiseAbs().maxCoeff(), 0.0);
  Eigen::Matrix<double, 6, 1> coeffs = eig.eigenvectors().transpose() * b;
  for (int i = 0; i < 6; ++i) coeffs(i) = values(i) > cutoff && values(i) > 0.0 ? coeffs(i) / values(i) : 0.0;
  return eig.eigenvectors() * coeffs;
}

}  // namespace thermalign::detail
