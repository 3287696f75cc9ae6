#pragma once

#include <complex>

#include <Eigen/Dense>

#include "clutter_em/rng.hpp"

namespace clutter {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Relative tolerance for accepting a matrix as Hermitian, scaled by max(1, max|a_ij|).
inline constexpr double kHermitianTolerance = 1e-10;

/// Square complex matrix that is Hermitian by construction.
///
/// The constructor rejects inputs whose anti-Hermitian part exceeds the
/// tolerance and stores (A + A^H) / 2, so the stored entries satisfy
/// a(i,j) == conj(a(j,i)) exactly.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& a, double tolerance = kHermitianTolerance);

  static HermitianMatrix identity(Index n);
  /// Real symmetric input.
  static HermitianMatrix from_real(const RMatrix& a);

  Index dim() const noexcept { return m_.rows(); }
  const CMatrix& matrix() const noexcept { return m_; }
  double trace() const { return m_.diagonal().real().sum(); }

  HermitianMatrix scaled(double factor) const;
  /// this + shift * I
  HermitianMatrix shifted(double shift) const;

 private:
  CMatrix m_;
};

/// Eigenvalues sorted descending with unitary eigenvectors in matching columns.
struct EigenDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;

  CMatrix reconstruct() const;
};

/// Throws NumericalError if the eigen solver does not converge.
EigenDecomposition hermitian_eig(const HermitianMatrix& a);

struct InverseLogDet {
  HermitianMatrix inverse;
  double log_det;
};

/// Inverse and log-determinant through a Cholesky factorization.
/// Throws NumericalError when `a` is not positive definite.
InverseLogDet inverse_and_logdet(const HermitianMatrix& a);

/// z^H A^{-1} z given A^{-1}.
double quad_form(const CVector& z, const HermitianMatrix& a_inv);

/// Cholesky factor of a positive-definite Hermitian matrix, kept for repeated
/// quadratic forms and density evaluations against the same covariance.
class CholeskyFactor {
 public:
  /// Throws NumericalError when `a` is not positive definite.
  explicit CholeskyFactor(const HermitianMatrix& a);

  double log_det() const noexcept { return log_det_; }
  /// z_k^H A^{-1} z_k for every column of `columns`.
  RVector quad_forms(const CMatrix& columns) const;
  /// Lower-triangular F with F F^H = A.
  const CMatrix& lower() const { return lower_; }

 private:
  CMatrix lower_;
  double log_det_ = 0.0;
};

/// N x K matrix of complex snapshots, one range bin per column.
class SnapshotSet {
 public:
  SnapshotSet() = default;
  explicit SnapshotSet(CMatrix data) : data_(std::move(data)) {}

  Index n_channels() const noexcept { return data_.rows(); }
  Index n_bins() const noexcept { return data_.cols(); }
  const CMatrix& data() const noexcept { return data_; }
  auto column(Index k) const { return data_.col(k); }

  bool operator==(const SnapshotSet& other) const { return data_ == other.data_; }

 private:
  CMatrix data_;
};

/// `count` i.i.d. CN(0, M) columns: F w with F the lower Cholesky factor of M.
SnapshotSet sample_complex_gaussian(const HermitianMatrix& m, Index count, Rng& rng);

/// Fills an n x count matrix with i.i.d. CN(0, 1) entries, column-major draw order.
CMatrix circular_normal_matrix(Index n, Index count, Rng& rng);

}  // namespace clutter
