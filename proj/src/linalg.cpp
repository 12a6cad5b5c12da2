#include "sphens/linalg.hpp"

#include <cmath>
#include <mutex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "sphens/errors.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace sphens {

namespace {

constexpr double kPivotFloor = 1e-300;

lapack_int as_lapack(std::size_t n) { return static_cast<lapack_int>(n); }

void require_finite(const ComplexMatrix& m, const char* what) {
  const Complex* p = m.data();
  for (std::size_t i = 0; i < m.size() * m.size(); ++i) {
    if (!std::isfinite(p[i].real()) || !std::isfinite(p[i].imag())) {
      throw DomainError(std::string(what) + ": matrix has non-finite entries");
    }
  }
}

}  // namespace

void configure_blas_threads() noexcept {
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
}

ComplexMatrix lu_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  configure_blas_threads();
  const std::size_t n = a.size();
  if (b.size() != n) throw DomainError("lu_solve: dimension mismatch");
  ComplexMatrix lu = a;
  ComplexMatrix x = b;
  std::vector<lapack_int> ipiv(n);
  const lapack_int ln = as_lapack(n);
  lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, ln, ln, lu.data(), ln, ipiv.data());
  if (info < 0) throw Error("lu_solve: zgetrf argument error");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(lu(i, i)) < kPivotFloor) {
      throw SingularMatrixError("SingularMatrix: LU pivot below 1e-300");
    }
  }
  info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', ln, ln, lu.data(), ln, ipiv.data(), x.data(), ln);
  if (info != 0) throw Error("lu_solve: zgetrs failed");
  return x;
}

Complex determinant(const ComplexMatrix& m) {
  configure_blas_threads();
  const std::size_t n = m.size();
  ComplexMatrix lu = m;
  std::vector<lapack_int> ipiv(n);
  const lapack_int ln = as_lapack(n);
  const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, ln, ln, lu.data(), ln, ipiv.data());
  if (info < 0) throw Error("determinant: zgetrf argument error");
  Complex det = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    det *= lu(i, i);
    if (ipiv[i] != static_cast<lapack_int>(i + 1)) det = -det;
  }
  return det;
}

std::vector<PlanePoint> complex_eigenvalues(const ComplexMatrix& m) {
  configure_blas_threads();
  require_finite(m, "complex_eigenvalues");
  const std::size_t n = m.size();
  ComplexMatrix work = m;
  std::vector<Complex> w(n);
  const lapack_int ln = as_lapack(n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', ln, work.data(), ln, w.data(),
                                        nullptr, 1, nullptr, 1);
  if (info > 0) throw ConvergenceFailure("ConvergenceFailure: QR iteration did not converge");
  if (info < 0) throw Error("complex_eigenvalues: zgeev argument error");
  std::vector<PlanePoint> out;
  out.reserve(n);
  for (const auto& v : w) out.push_back({v.real(), v.imag()});
  return out;
}

ValidatedEigenvalues complex_eigenvalues_validated(const ComplexMatrix& m) {
  configure_blas_threads();
  require_finite(m, "complex_eigenvalues_validated");
  const std::size_t n = m.size();
  ComplexMatrix work = m;
  ComplexMatrix vr(n);
  std::vector<Complex> w(n);
  const lapack_int ln = as_lapack(n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', ln, work.data(), ln, w.data(),
                                        nullptr, 1, vr.data(), ln);
  if (info > 0) throw ConvergenceFailure("ConvergenceFailure: QR iteration did not converge");
  if (info < 0) throw Error("complex_eigenvalues_validated: zgeev argument error");

  double frob = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) frob += std::norm(m.data()[i]);
  frob = std::sqrt(frob);

  ValidatedEigenvalues result;
  result.values.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    result.values.push_back({w[k].real(), w[k].imag()});
    double vnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) vnorm += std::norm(vr(i, k));
    vnorm = std::sqrt(vnorm);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex acc = -w[k] * vr(i, k);
      for (std::size_t j = 0; j < n; ++j) acc += m(i, j) * vr(j, k);
      res += std::norm(acc);
    }
    const double rel = std::sqrt(res) / (vnorm * (frob > 0.0 ? frob : 1.0));
    result.max_residual = std::max(result.max_residual, rel);
  }
  return result;
}

}  // namespace sphens
