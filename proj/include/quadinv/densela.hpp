#pragma once

// Small dense linear algebra layer over Eigen: SVD-based pseudoinverse solve,
// ridge solve, effective rank and condition number, and a pivoted direct solve.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "quadinv/error.hpp"

namespace quadinv::densela {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SvdResult {
  Vector singular_values;  // non-increasing, >= 0
  Matrix left_basis;       // rows x k, orthonormal columns
  Matrix right_basis;      // cols x k, orthonormal columns
};

inline std::string shape_str(Eigen::Index rows, Eigen::Index cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DataError(std::string(what) + " contains non-finite entries");
}

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw DataError(std::string(what) + " contains non-finite entries");
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// Thin SVD, k = min(rows, cols).
inline SvdResult svd(const Matrix& m) {
  if (m.rows() < 1 || m.cols() < 1) throw UsageError("svd: empty matrix");
  require_finite(m, "svd input");
  Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success || !dec.singularValues().allFinite())
    throw NumericalError("svd failed to converge for " + shape_str(m.rows(), m.cols()) + " matrix");
  return {dec.singularValues(), dec.matrixU(), dec.matrixV()};
}

/// max(rows, cols) * eps * sigma_max.
inline double default_rank_tol(Eigen::Index rows, Eigen::Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sigma_max;
}

namespace detail {

inline double resolve_tol(const Matrix& m, const SvdResult& s, std::optional<double> rank_tol) {
  if (rank_tol) {
    if (!(*rank_tol >= 0.0) || !std::isfinite(*rank_tol)) throw UsageError("rank tolerance must be finite and >= 0");
    return *rank_tol;
  }
  const double smax = s.singular_values.size() ? s.singular_values(0) : 0.0;
  return default_rank_tol(m.rows(), m.cols(), smax);
}

inline Eigen::Index count_above(const Vector& sv, double tol) {
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++k;
  return k;
}

}  // namespace detail

/// Minimum-norm least-squares solution M⁺b, discarding singular values <= rank_tol.
inline Vector pinv_solve(const Matrix& m, const Vector& b, std::optional<double> rank_tol = std::nullopt) {
  if (m.rows() != b.size())
    throw UsageError("pinv_solve: " + shape_str(m.rows(), m.cols()) + " matrix against vector of length " +
                     std::to_string(b.size()));
  require_finite(b, "pinv_solve right-hand side");
  const SvdResult s = svd(m);
  const double tol = detail::resolve_tol(m, s, rank_tol);
  Vector x = Vector::Zero(m.cols());
  for (Eigen::Index k = 0; k < s.singular_values.size(); ++k) {
    const double sigma = s.singular_values(k);
    if (sigma <= tol) break;
    x += s.right_basis.col(k) * (s.left_basis.col(k).dot(b) / sigma);
  }
  return x;
}

inline Eigen::Index numerical_rank(const Matrix& m, std::optional<double> rank_tol = std::nullopt) {
  const SvdResult s = svd(m);
  return detail::count_above(s.singular_values, detail::resolve_tol(m, s, rank_tol));
}

/// sigma_max over the smallest singular value above the rank tolerance.
inline double condition_number(const Matrix& m, std::optional<double> rank_tol = std::nullopt) {
  const SvdResult s = svd(m);
  const double tol = detail::resolve_tol(m, s, rank_tol);
  const Eigen::Index k = detail::count_above(s.singular_values, tol);
  if (k == 0) throw NumericalError("condition_number: no nonzero singular values");
  return s.singular_values(0) / s.singular_values(k - 1);
}

/// Full-pivot LU solve; throws SingularMatrixError when a pivot vanishes or
/// the residual bound ||Mx - b||_inf <= 1e-9 max(1, ||b||_inf) is not met.
inline Vector solve_linear(const Matrix& m, const Vector& b) {
  if (m.rows() != m.cols()) throw UsageError("solve_linear: matrix " + shape_str(m.rows(), m.cols()) + " is not square");
  if (m.rows() != b.size()) throw UsageError("solve_linear: dimension mismatch");
  require_finite(m, "solve_linear matrix");
  require_finite(b, "solve_linear right-hand side");
  Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible()) throw SingularMatrixError("solve_linear: matrix is singular within pivot tolerance");
  Vector x = lu.solve(b);
  const double resid = (m * x - b).cwiseAbs().maxCoeff();
  if (!x.allFinite() || resid > 1e-9 * std::max(1.0, max_abs(b)))
    throw SingularMatrixError("solve_linear: residual bound not met, matrix numerically singular");
  return x;
}

/// Ridge solve (M + lambda I) w = b for a symmetric PSD M.
inline Vector tikhonov_solve(const Matrix& m, const Vector& b, double lambda) {
  if (m.rows() != m.cols()) throw UsageError("tikhonov_solve: matrix must be square");
  if (m.rows() != b.size()) throw UsageError("tikhonov_solve: dimension mismatch");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw UsageError("tikhonov_solve: lambda must be finite and >= 0");
  require_finite(m, "tikhonov_solve matrix");
  require_finite(b, "tikhonov_solve right-hand side");
  Matrix reg = m;
  reg.diagonal().array() += lambda;
  const Eigen::LDLT<Matrix> ldlt(reg);
  const double floor = static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon();
  const Vector d = ldlt.vectorD().cwiseAbs();
  // rcond() alone misses exactly zero pivots, so the pivot spread is checked too.
  const bool ok = ldlt.info() == Eigen::Success && d.size() > 0 && d.minCoeff() > floor * d.maxCoeff() &&
                  ldlt.rcond() > floor;
  if (!ok) {
    throw NumericalError("tikhonov_solve: regularized matrix is numerically singular (lambda = " +
                         std::to_string(lambda) + "); use pinv_solve or a positive lambda");
  }
  return ldlt.solve(b);
}

}  // namespace quadinv::densela
