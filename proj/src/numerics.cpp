#include "clutter_em/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "clutter_em/error.hpp"

namespace clutter {

HermitianMatrix::HermitianMatrix(const CMatrix& a, double tolerance) {
  if (a.rows() != a.cols()) {
    throw StructuralError(fmt::format("Hermitian matrix must be square, got {}x{}", a.rows(), a.cols()));
  }
  if (!a.allFinite()) {
    throw StructuralError("Hermitian matrix has non-finite entries");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double skew = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (a.size() > 0 && skew > tolerance * scale) {
    throw StructuralError(fmt::format("matrix is not Hermitian (max |A - A^H| = {:.3e})", skew));
  }
  m_ = 0.5 * (a + a.adjoint());
}

HermitianMatrix HermitianMatrix::identity(Index n) {
  return HermitianMatrix(CMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::from_real(const RMatrix& a) {
  return HermitianMatrix(a.cast<Complex>());
}

HermitianMatrix HermitianMatrix::scaled(double factor) const {
  HermitianMatrix out;
  out.m_ = m_ * factor;
  return out;
}

HermitianMatrix HermitianMatrix::shifted(double shift) const {
  HermitianMatrix out;
  out.m_ = m_;
  out.m_.diagonal().array() += shift;
  return out;
}

CMatrix EigenDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

EigenDecomposition hermitian_eig(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigendecomposition did not converge");
  }
  // Eigen returns ascending order.
  const Index n = a.dim();
  EigenDecomposition out{RVector(n), CMatrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
    out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

CholeskyFactor::CholeskyFactor(const HermitianMatrix& a) {
  Eigen::LLT<CMatrix> llt(a.matrix());
  if (llt.info() != Eigen::Success) {
    throw NumericalError("matrix is not positive definite (Cholesky failed)");
  }
  lower_ = llt.matrixL();
  const auto diag = lower_.diagonal().real();
  if ((diag.array() <= 0.0).any()) {
    throw NumericalError("matrix is not positive definite (zero pivot)");
  }
  log_det_ = 2.0 * diag.array().log().sum();
}

RVector CholeskyFactor::quad_forms(const CMatrix& columns) const {
  if (columns.rows() != lower_.rows()) {
    throw StructuralError(fmt::format("dimension mismatch: vectors of size {} against {}x{} matrix",
                                      columns.rows(), lower_.rows(), lower_.cols()));
  }
  const CMatrix whitened = lower_.triangularView<Eigen::Lower>().solve(columns);
  return whitened.colwise().squaredNorm().transpose();
}

InverseLogDet inverse_and_logdet(const HermitianMatrix& a) {
  const CholeskyFactor chol(a);
  const Index n = a.dim();
  const CMatrix linv = chol.lower().triangularView<Eigen::Lower>().solve(CMatrix::Identity(n, n));
  // Tolerance is loose on purpose: L^{-H} L^{-1} is Hermitian only up to rounding.
  return {HermitianMatrix(linv.adjoint() * linv, 1e-6), chol.log_det()};
}

double quad_form(const CVector& z, const HermitianMatrix& a_inv) {
  if (z.size() != a_inv.dim()) {
    throw StructuralError(fmt::format("dimension mismatch: vector of size {} against {}x{} matrix",
                                      z.size(), a_inv.dim(), a_inv.dim()));
  }
  return (z.adjoint() * a_inv.matrix() * z)(0, 0).real();
}

CMatrix circular_normal_matrix(Index n, Index count, Rng& rng) {
  CMatrix w(n, count);
  for (Index k = 0; k < count; ++k) {
    for (Index i = 0; i < n; ++i) w(i, k) = rng.circular_normal();
  }
  return w;
}

SnapshotSet sample_complex_gaussian(const HermitianMatrix& m, Index count, Rng& rng) {
  if (count < 1) throw StructuralError("sample count must be at least 1");
  const CholeskyFactor chol(m);
  const CMatrix w = circular_normal_matrix(m.dim(), count, rng);
  return SnapshotSet(chol.lower().triangularView<Eigen::Lower>() * w);
}

}  // namespace clutter
