// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The irscf Authors
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace irscf {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Row-major nested array, indexed [outer][inner] (e.g. [bs][ue]).
template <class T>
using Grid = std::vector<std::vector<T>>;

inline constexpr double kPi = 3.14159265358979323846;

inline CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

inline double real_trace(const CMat& a) { return a.trace().real(); }

/// log|det A| for a general square matrix via partial-pivot LU.
/// Returns the complex logarithm of the determinant.
inline cplx log_det(const CMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("log_det: matrix not square");
  if (a.rows() == 0) return {0.0, 0.0};
  Eigen::PartialPivLU<CMat> lu(a);
  const CMat& m = lu.matrixLU();
  cplx acc{0.0, 0.0};
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::abs(m(i, i)) == 0.0) throw std::domain_error("log_det: singular matrix");
    acc += std::log(m(i, i));
  }
  // Permutation sign only affects the imaginary part (adds i*pi).
  if (lu.permutationP().determinant() < 0) acc += cplx(0.0, kPi);
  return acc;
}

/// log det of a Hermitian positive-definite matrix (Cholesky).
inline double log_det_hpd(const CMat& a) {
  Eigen::LLT<CMat> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) throw std::domain_error("log_det_hpd: matrix not positive definite");
  const CMat& l = llt.matrixL();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += 2.0 * std::log(l(i, i).real());
  return acc;
}

/// Smallest eigenvalue of the Hermitian part of `a`.
inline double min_eigenvalue(const CMat& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const CMat& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Inverse of a Hermitian PSD matrix with eigenvalues below floor * max(1, lambda_max)
/// treated as zero (Moore-Penrose on the numerical range).
inline CMat pinv_hpsd(const CMat& a, double floor = 1e-10) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
  const RVec& ev = es.eigenvalues();
  const double cut = floor * std::max(1.0, ev.cwiseAbs().maxCoeff());
  RVec inv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) inv(i) = ev(i) > cut ? 1.0 / ev(i) : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

/// Solve A X = B for Hermitian positive-definite A.
inline CMat solve_hpd(const CMat& a, const CMat& b) {
  Eigen::LLT<CMat> llt(hermitian_part(a));
  if (llt.info() != Eigen::Success) throw std::domain_error("solve_hpd: matrix not positive definite");
  return llt.solve(b);
}

inline bool all_finite(const CMat& a) {
  return a.allFinite();
}

}  // namespace irscf
