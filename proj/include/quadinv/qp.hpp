#pragma once

// Direct problem: min ½xᵀGx + cᵀx subject to Ax <= b, solved by enumerating
// every working set S of constraints and solving the equality-constrained KKT
// system
//
//   [ G    A_Sᵀ ] [ x   ]   [ -c  ]
//   [ A_S  0    ] [ λ_S ] = [ b_S ]
//
// Candidates must be primal feasible with λ_S >= 0. Among candidates the
// lowest objective wins; ties go to the smaller set, then the
// lexicographically smaller one. Enumeration visits sets in exactly that
// order, so a later candidate replaces the incumbent only if strictly better.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "quadinv/densela.hpp"
#include "quadinv/inverse.hpp"
#include "quadinv/model.hpp"

namespace quadinv {

inline constexpr Eigen::Index kMaxEnumeratedConstraints = 20;

struct QpTolerances {
  double feasibility = 1e-8;
  double stationarity = 1e-8;
  double multiplier = 1e-9;

  /// tol_feas = tol_kkt = 1e-8·max(1, ‖b‖∞, ‖c‖∞), tol_λ = 1e-9.
  static QpTolerances defaults_for(const QuadraticModel& model, const ConstraintSet& cons) {
    const double scale = std::max({1.0, densela::max_abs(cons.b()), densela::max_abs(model.c())});
    return {1e-8 * scale, 1e-8 * scale, 1e-9};
  }
};

struct QpSolution {
  Vector x_star;
  double f_star = 0.0;
  // Constraints holding with equality at x_star (zero-based indices).
  std::vector<Eigen::Index> active_set;
  // Working set whose KKT system produced x_star; a subset of active_set.
  std::vector<Eigen::Index> working_set;
  // One entry per constraint; zero outside the working set.
  Vector multipliers;
  int candidates_accepted = 0;
  int singular_skips = 0;
};

struct KktReport {
  double max_feasibility_violation = 0.0;
  double max_stationarity = 0.0;
  double min_multiplier = 0.0;
  double max_complementarity = 0.0;

  bool passes(const QpTolerances& tol) const {
    return max_feasibility_violation <= tol.feasibility && max_stationarity <= tol.stationarity &&
           min_multiplier >= -tol.multiplier;
  }
};

inline KktReport kkt_residual(const QuadraticModel& model, const ConstraintSet& cons, const QpSolution& sol) {
  require_dim(sol.x_star.size(), model.dim(), "kkt_residual");
  require_dim(cons.dim(), model.dim(), "kkt_residual");
  if (sol.multipliers.size() != cons.size()) throw UsageError("kkt_residual: multiplier count differs from K");
  KktReport rep;
  Vector grad = model.G() * sol.x_star + model.c();
  if (cons.size() > 0) {
    const Vector slack = cons.A() * sol.x_star - cons.b();
    rep.max_feasibility_violation = std::max(0.0, slack.maxCoeff());
    rep.min_multiplier = std::min(0.0, sol.multipliers.minCoeff());
    rep.max_complementarity = sol.multipliers.cwiseProduct(slack).cwiseAbs().maxCoeff();
    grad += cons.A().transpose() * sol.multipliers;
  }
  rep.max_stationarity = densela::max_abs(grad);
  return rep;
}

namespace detail {

struct KktCandidate {
  Vector x;
  Vector lambda;  // working-set multipliers
};

inline std::optional<KktCandidate> solve_kkt(const Matrix& g, const Vector& c, const ConstraintSet& cons,
                                             const std::vector<Eigen::Index>& set) {
  const Eigen::Index m = g.rows();
  const auto k = static_cast<Eigen::Index>(set.size());
  Matrix kkt = Matrix::Zero(m + k, m + k);
  Vector rhs(m + k);
  kkt.topLeftCorner(m, m) = g;
  rhs.head(m) = -c;
  for (Eigen::Index j = 0; j < k; ++j) {
    kkt.block(m + j, 0, 1, m) = cons.A().row(set[j]);
    kkt.block(0, m + j, m, 1) = cons.A().row(set[j]).transpose();
    rhs(m + j) = cons.b()(set[j]);
  }
  try {
    const Vector sol = densela::solve_linear(kkt, rhs);
    return KktCandidate{sol.head(m), sol.tail(k)};
  } catch (const SingularMatrixError&) {
    return std::nullopt;
  }
}

// Visits subsets of {0..n-1} by size, then lexicographically; the callback
// returns nothing and sees a sorted index list.
template <class Fn>
void for_each_subset(Eigen::Index n, Fn&& fn) {
  std::vector<Eigen::Index> set;
  for (Eigen::Index size = 0; size <= n; ++size) {
    set.resize(static_cast<std::size_t>(size));
    for (Eigen::Index j = 0; j < size; ++j) set[j] = j;
    while (true) {
      fn(static_cast<const std::vector<Eigen::Index>&>(set));
      Eigen::Index j = size - 1;
      while (j >= 0 && set[j] == n - size + j) --j;
      if (j < 0) break;
      ++set[j];
      for (Eigen::Index t = j + 1; t < size; ++t) set[t] = set[t - 1] + 1;
    }
  }
}

struct Enumeration {
  std::optional<QpSolution> best;
  int singular_skips = 0;
  int accepted = 0;
};

inline Enumeration enumerate(const Matrix& g, const Vector& c, const ConstraintSet& cons, const QpTolerances& tol) {
  Enumeration out;
  for_each_subset(cons.size(), [&](const std::vector<Eigen::Index>& set) {
    auto cand = solve_kkt(g, c, cons, set);
    if (!cand) {
      ++out.singular_skips;
      return;
    }
    if (cons.size() > 0 && (cons.A() * cand->x - cons.b()).maxCoeff() > tol.feasibility) return;
    if (cand->lambda.size() > 0 && cand->lambda.minCoeff() < -tol.multiplier) return;
    const double f = 0.5 * cand->x.dot(g * cand->x) + c.dot(cand->x);
    ++out.accepted;
    if (out.best && !(f < out.best->f_star - 1e-12 * std::max(1.0, std::abs(out.best->f_star)))) return;
    QpSolution sol;
    sol.x_star = cand->x;
    sol.f_star = f;
    sol.working_set = set;
    sol.multipliers = Vector::Zero(cons.size());
    for (std::size_t j = 0; j < set.size(); ++j) sol.multipliers(set[j]) = std::max(0.0, cand->lambda(j));
    out.best = std::move(sol);
  });
  if (out.best) out.best->candidates_accepted = out.accepted;
  return out;
}

}  // namespace detail

/// Phase-one check: the feasible region is nonempty iff the projection of the
/// origin onto {x : Ax <= b} (a strictly convex QP) has a KKT point.
inline bool feasible_region_nonempty(const ConstraintSet& cons) {
  if (cons.size() == 0) return true;
  const Eigen::Index m = cons.dim();
  const double scale = std::max(1.0, densela::max_abs(cons.b()));
  const QpTolerances tol{1e-8 * scale, 1e-8 * scale, 1e-9};
  return detail::enumerate(Matrix::Identity(m, m), Vector::Zero(m), cons, tol).best.has_value();
}

inline QpSolution solve_qp(const QuadraticModel& model, const ConstraintSet& cons,
                           std::optional<QpTolerances> tolerances = std::nullopt) {
  require_dim(cons.dim(), model.dim(), "solve_qp");
  if (cons.size() > kMaxEnumeratedConstraints)
    throw UsageError("solve_qp: " + std::to_string(cons.size()) + " constraints exceeds the enumeration cap of " +
                     std::to_string(kMaxEnumeratedConstraints));
  const QpTolerances tol = tolerances.value_or(QpTolerances::defaults_for(model, cons));
  detail::Enumeration en = detail::enumerate(model.G(), model.c(), cons, tol);
  if (!en.best) {
    const bool empty = !feasible_region_nonempty(cons);
    std::string msg = empty ? "solve_qp: feasible region appears empty (phase-one check found no feasible point)"
                            : "solve_qp: no feasible KKT point found; feasible region is nonempty";
    msg += " (" + std::to_string(en.singular_skips) + " singular KKT systems skipped)";
    throw NoSolutionError(msg, empty, en.singular_skips);
  }
  QpSolution sol = std::move(*en.best);
  sol.singular_skips = en.singular_skips;
  if (cons.size() > 0) {
    const Vector slack = cons.A() * sol.x_star - cons.b();
    for (Eigen::Index i = 0; i < cons.size(); ++i)
      if (std::abs(slack(i)) <= tol.feasibility) sol.active_set.push_back(i);
  }
  return sol;
}

struct Reconstruction {
  FitResult fit;
  QpSolution qp;
  double min_eigenvalue = 0.0;
  bool convex = true;
  // f_star + w00/2: the minimum of the fitted surface including its constant offset.
  double f_star_with_offset = 0.0;
  std::vector<std::string> warnings;
};

/// Fits (G, c) from data, then solves the direct problem under cons. w00 is
/// reported but does not enter the QP.
inline Reconstruction reconstruct(const Dataset& data, const ConstraintSet& cons,
                                  const Solver& solver = PseudoinverseSolver{}) {
  require_dim(cons.dim(), data.dim(), "reconstruct");
  FitResult fr = fit(data, solver);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(fr.model.G(), Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double tol = 1e-10 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<std::string> warnings;
  if (lo < -tol)
    warnings.push_back("recovered G is not positive semidefinite (min eigenvalue " + std::to_string(lo) +
                       "); the reported point is a KKT point, not a certified minimum");
  if (fr.rank < symmetric_dim(data.dim()))
    warnings.push_back("left matrix is rank deficient (rank " + std::to_string(fr.rank) + " < " +
                       std::to_string(symmetric_dim(data.dim())) + ")");
  QpSolution sol = solve_qp(fr.model, cons);
  const double offset = sol.f_star + 0.5 * fr.w00;
  return Reconstruction{std::move(fr), std::move(sol), lo, lo >= -tol, offset, std::move(warnings)};
}

}  // namespace quadinv
