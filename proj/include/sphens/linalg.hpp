#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "sphens/geometry.hpp"

namespace sphens {

using Complex = std::complex<double>;

/// Dense square complex matrix, column-major (LAPACK layout).
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}

  std::size_t size() const noexcept { return n_; }
  Complex& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * n_ + i]; }
  const Complex& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[j * n_ + i];
  }
  Complex* data() noexcept { return data_.data(); }
  const Complex* data() const noexcept { return data_.data(); }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Complex> data_;
};

/// Pins the BLAS backend to one thread; parallelism lives in the harness.
void configure_blas_threads() noexcept;

/// A^{-1} B by LU factorization of A (no explicit inverse).
/// Throws SingularMatrixError if a pivot of A has modulus below 1e-300.
ComplexMatrix lu_solve(const ComplexMatrix& a, const ComplexMatrix& b);

/// Determinant via LU; used as an independent oracle for eigenvalue products.
Complex determinant(const ComplexMatrix& m);

/// All eigenvalues with multiplicity (LAPACK zgeev).
/// Throws ConvergenceFailure if the QR iteration fails.
std::vector<PlanePoint> complex_eigenvalues(const ComplexMatrix& m);

/// Eigenvalues plus the worst relative residual ||Mv - lv|| / ||M||_F over
/// recomputed unit eigenvectors.
struct ValidatedEigenvalues {
  std::vector<PlanePoint> values;
  double max_residual = 0.0;
};
ValidatedEigenvalues complex_eigenvalues_validated(const ComplexMatrix& m);

}  // namespace sphens
