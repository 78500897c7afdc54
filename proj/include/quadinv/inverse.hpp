#pragma once

// Recovery of (G, c) from observed pairs (x_i, y_i).
//
// Minimizing Q(W) = ½ Σ (x̂ᵢᵀWx̂ᵢ − 2yᵢ)² over the entries of W gives the
// (m+1)² normal equations
//
//   Σᵢ Σ_{l,t} x̂_lᵢ w_lt x̂_tᵢ x̂_pᵢ x̂_rᵢ = 2 Σᵢ yᵢ x̂_pᵢ x̂_rᵢ,   p, r = 0..m.
//
// Unknowns and equations are both indexed row-major, rho(p, r) = p (m+1) + r.
// The system carries every (p, r) pair, so rows rho(p, r) and rho(r, p)
// coincide and the rank is at most (m+1)(m+2)/2; it is solved with the
// pseudoinverse (or a ridge term).

#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "quadinv/densela.hpp"
#include "quadinv/model.hpp"

namespace quadinv {

inline Eigen::Index rho(Eigen::Index p, Eigen::Index r, Eigen::Index m) { return p * (m + 1) + r; }

/// Upper bound on the rank of the left matrix for dimension m.
inline Eigen::Index symmetric_dim(Eigen::Index m) { return (m + 1) * (m + 2) / 2; }

struct SystemOfEquations {
  Matrix left;
  Vector right;
  Eigen::Index m = 0;
  Eigen::Index n = 0;
};

/// v(rho(p, r)) = x̂_p x̂_r.
inline Vector feature_vector(const Vector& xhat) {
  const Eigen::Index k = xhat.size();
  Vector v(k * k);
  for (Eigen::Index p = 0; p < k; ++p)
    for (Eigen::Index r = 0; r < k; ++r) v(p * k + r) = xhat(p) * xhat(r);
  return v;
}

namespace detail {

inline Matrix augmented_points(const Dataset& data) {
  Matrix xh(data.dim() + 1, data.size());
  xh.row(0).setOnes();
  xh.bottomRows(data.dim()) = data.points().transpose();
  return xh;
}

}  // namespace detail

/// Row rho(p, r) is vec(X̂ D_p D_r X̂ᵀ): entry rho(l, t) = Σᵢ (x̂_pᵢ x̂_rᵢ)(x̂_lᵢ x̂_tᵢ).
/// Products are grouped so that the matrix is exactly symmetric and rows
/// rho(p, r), rho(r, p) are bit-identical.
inline Matrix build_left_matrix(const Dataset& data) {
  const Eigen::Index m = data.dim();
  const Eigen::Index k = m + 1;
  const Matrix xh = detail::augmented_points(data);
  Matrix left = Matrix::Zero(k * k, k * k);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index p = 0; p < k; ++p) {
      for (Eigen::Index r = 0; r < k; ++r) {
        const double d = xh(p, i) * xh(r, i);
        const Eigen::Index row = rho(p, r, m);
        for (Eigen::Index l = 0; l < k; ++l)
          for (Eigen::Index t = 0; t < k; ++t) left(row, rho(l, t, m)) += d * (xh(l, i) * xh(t, i));
      }
    }
  }
  return left;
}

/// Entry rho(p, r) = 2 Σᵢ yᵢ x̂_pᵢ x̂_rᵢ, i.e. vec(2 X̂ D_y X̂ᵀ).
inline Vector build_right_vector(const Dataset& data) {
  const Eigen::Index m = data.dim();
  const Eigen::Index k = m + 1;
  const Matrix xh = detail::augmented_points(data);
  Vector right = Vector::Zero(k * k);
  for (Eigen::Index i = 0; i < data.size(); ++i)
    for (Eigen::Index p = 0; p < k; ++p)
      for (Eigen::Index r = 0; r < k; ++r) right(rho(p, r, m)) += data.value(i) * (xh(p, i) * xh(r, i));
  return 2.0 * right;
}

/// Checks the structural invariants of an assembled system; throws InternalError.
inline void validate_system(const SystemOfEquations& sys) {
  const Eigen::Index m = sys.m;
  const Eigen::Index k = m + 1;
  if (sys.left.rows() != k * k || sys.left.cols() != k * k || sys.right.size() != k * k)
    throw InternalError("system has wrong shape");
  if (sys.left != sys.left.transpose()) throw InternalError("left matrix is not symmetric");
  for (Eigen::Index p = 0; p < k; ++p) {
    for (Eigen::Index r = p + 1; r < k; ++r) {
      if (sys.left.row(rho(p, r, m)) != sys.left.row(rho(r, p, m)))
        throw InternalError("left matrix rows rho(p,r) and rho(r,p) differ");
      if (sys.right(rho(p, r, m)) != sys.right(rho(r, p, m)))
        throw InternalError("right vector entries rho(p,r) and rho(r,p) differ");
    }
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sys.left, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (lo < -1e-10 * hi) throw InternalError("left matrix is not positive semidefinite");
}

inline SystemOfEquations build_system(const Dataset& data) {
  SystemOfEquations sys{build_left_matrix(data), build_right_vector(data), data.dim(), data.size()};
  validate_system(sys);
  return sys;
}

/// Gram form M = Σ vᵢvᵢᵀ, r = 2Σ yᵢvᵢ with vᵢ = feature_vector(x̂ᵢ); used as a cross-check.
inline std::pair<Matrix, Vector> build_gram_oracle(const Dataset& data) {
  const Eigen::Index k = data.dim() + 1;
  Matrix gram = Matrix::Zero(k * k, k * k);
  Vector rhs = Vector::Zero(k * k);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Vector v = feature_vector(augment(data.point(i)));
    gram.noalias() += v * v.transpose();
    rhs += (2.0 * data.value(i)) * v;
  }
  return {gram, rhs};
}

struct PseudoinverseSolver {
  std::optional<double> rank_tol;
};

struct TikhonovSolver {
  double lambda = 0.0;
};

using Solver = std::variant<PseudoinverseSolver, TikhonovSolver>;

inline std::string solver_tag(const Solver& solver) {
  if (const auto* t = std::get_if<TikhonovSolver>(&solver)) {
    std::ostringstream os;
    os.precision(17);
    os << "tikhonov(" << t->lambda << ")";
    return os.str();
  }
  return "pseudoinverse";
}

struct FitResult {
  AugmentedModel W;
  QuadraticModel model;
  double w00 = 0.0;
  double q_residual = 0.0;
  double phi_residual = 0.0;
  Eigen::Index rank = 0;
  // Rank of [left | right]; equal to rank when the system is consistent.
  Eigen::Index augmented_rank = 0;
  double cond = 0.0;
  std::string solver_used;
  // ‖W − Wᵀ‖_max of the raw solution, before symmetrization.
  double raw_asymmetry = 0.0;
};

inline FitResult fit(const Dataset& data, const Solver& solver = PseudoinverseSolver{}) {
  const Eigen::Index m = data.dim();
  if (m < 1) throw UsageError("fit: dataset dimension must be >= 1");
  const SystemOfEquations sys = build_system(data);

  std::optional<double> rank_tol;
  Vector w;
  if (const auto* t = std::get_if<TikhonovSolver>(&solver)) {
    w = densela::tikhonov_solve(sys.left, sys.right, t->lambda);
  } else {
    rank_tol = std::get<PseudoinverseSolver>(solver).rank_tol;
    w = densela::pinv_solve(sys.left, sys.right, rank_tol);
  }

  const Eigen::Index k = m + 1;
  Matrix raw(k, k);
  for (Eigen::Index p = 0; p < k; ++p)
    for (Eigen::Index r = 0; r < k; ++r) raw(p, r) = w(rho(p, r, m));
  const double asym = detail::asymmetry(raw);
  AugmentedModel aug(0.5 * (raw + raw.transpose()));
  ExtractedModel ex = extract_model(aug);

  Matrix with_rhs(sys.left.rows(), sys.left.cols() + 1);
  with_rhs << sys.left, sys.right;

  const double q = q_objective(aug, data);
  const double phi = phi_objective(ex.model, data);
  return FitResult{std::move(aug),
                   std::move(ex.model),
                   ex.w00,
                   q,
                   phi,
                   densela::numerical_rank(sys.left, rank_tol),
                   densela::numerical_rank(with_rhs, rank_tol),
                   densela::condition_number(sys.left, rank_tol),
                   solver_tag(solver),
                   asym};
}

/// ∂Q/∂w_pr = Σᵢ (x̂ᵢᵀWx̂ᵢ − 2yᵢ) x̂_pᵢ x̂_rᵢ, each w_pr treated as independent.
inline Matrix stationarity_residual(const AugmentedModel& aug, const Dataset& data) {
  require_dim(data.dim(), aug.dim(), "stationarity_residual");
  const Eigen::Index k = aug.dim() + 1;
  Matrix grad = Matrix::Zero(k, k);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Vector xh = augment(data.point(i));
    const double resid = xh.dot(aug.W() * xh) - 2.0 * data.value(i);
    grad.noalias() += resid * (xh * xh.transpose());
  }
  return grad;
}

}  // namespace quadinv
