#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "quadinv/densela.hpp"
#include "quadinv/error.hpp"

namespace quadinv {

using densela::Matrix;
using densela::Vector;

namespace detail {

inline double asymmetry(const Matrix& m) { return densela::max_abs(Matrix(m - m.transpose())); }

inline bool within_symmetry_tol(const Matrix& m) {
  return asymmetry(m) <= 1e-9 * std::max(1.0, densela::max_abs(m));
}

}  // namespace detail

/// f(x) = ½ xᵀGx + cᵀx with G symmetric.
class QuadraticModel {
 public:
  /// Accepts G symmetric to within 1e-9·max(1, ‖G‖_max) and stores ½(G + Gᵀ);
  /// anything further from symmetric is rejected with DataError.
  QuadraticModel(Matrix g, Vector c) : g_(std::move(g)), c_(std::move(c)) {
    if (g_.rows() != g_.cols()) throw UsageError("QuadraticModel: G must be square");
    if (g_.rows() != c_.size()) throw UsageError("QuadraticModel: G and c dimensions differ");
    if (c_.size() < 1) throw UsageError("QuadraticModel: dimension must be >= 1");
    densela::require_finite(g_, "G");
    densela::require_finite(c_, "c");
    if (!detail::within_symmetry_tol(g_)) throw DataError("QuadraticModel: G is not symmetric");
    g_ = 0.5 * (g_ + g_.transpose()).eval();
  }

  /// Deliberate symmetrization of an arbitrary square G.
  static QuadraticModel symmetrized(const Matrix& g, Vector c) {
    if (g.rows() != g.cols()) throw UsageError("QuadraticModel: G must be square");
    return QuadraticModel(0.5 * (g + g.transpose()), std::move(c));
  }

  const Matrix& G() const { return g_; }
  const Vector& c() const { return c_; }
  Eigen::Index dim() const { return c_.size(); }

 private:
  Matrix g_;
  Vector c_;
};

/// N observation pairs (x_i, y_i); points are stored one observation per row.
class Dataset {
 public:
  Dataset(Matrix points, Vector values) : points_(std::move(points)), values_(std::move(values)) {
    if (points_.rows() == 0 || values_.size() == 0) throw UsageError("Dataset: empty dataset");
    if (points_.rows() != values_.size())
      throw UsageError("Dataset: " + std::to_string(points_.rows()) + " points but " +
                       std::to_string(values_.size()) + " values");
    densela::require_finite(points_, "dataset points");
    densela::require_finite(values_, "dataset values");
  }

  const Matrix& points() const { return points_; }
  const Vector& values() const { return values_; }
  Vector point(Eigen::Index i) const { return points_.row(i).transpose(); }
  double value(Eigen::Index i) const { return values_(i); }
  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }

 private:
  Matrix points_;
  Vector values_;
};

inline Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.dim() != b.dim()) throw UsageError("concat: datasets differ in dimension");
  Matrix pts(a.size() + b.size(), a.dim());
  pts << a.points(), b.points();
  Vector vals(a.size() + b.size());
  vals << a.values(), b.values();
  return Dataset(std::move(pts), std::move(vals));
}

/// Symmetric (m+1)x(m+1) W = [[w00, cᵀ], [c, G]].
class AugmentedModel {
 public:
  explicit AugmentedModel(Matrix w) : w_(std::move(w)) {
    if (w_.rows() != w_.cols()) throw UsageError("AugmentedModel: W must be square");
    if (w_.rows() < 2) throw UsageError("AugmentedModel: W must be at least 2x2");
    densela::require_finite(w_, "W");
    if (!detail::within_symmetry_tol(w_)) throw DataError("AugmentedModel: W is not symmetric");
    w_ = 0.5 * (w_ + w_.transpose()).eval();
  }

  const Matrix& W() const { return w_; }
  Eigen::Index dim() const { return w_.rows() - 1; }
  double w00() const { return w_(0, 0); }

 private:
  Matrix w_;
};

/// Inequalities A x <= b; K = 0 rows is allowed.
class ConstraintSet {
 public:
  ConstraintSet(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != b_.size()) throw UsageError("ConstraintSet: A and b row counts differ");
    densela::require_finite(a_, "A");
    densela::require_finite(b_, "b");
  }

  static ConstraintSet none(Eigen::Index m) { return ConstraintSet(Matrix(0, m), Vector(0)); }

  const Matrix& A() const { return a_; }
  const Vector& b() const { return b_; }
  Eigen::Index size() const { return a_.rows(); }
  Eigen::Index dim() const { return a_.cols(); }

 private:
  Matrix a_;
  Vector b_;
};

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want)
    throw UsageError(std::string(what) + ": dimension " + std::to_string(got) + " does not match model dimension " +
                     std::to_string(want));
}

inline double evaluate_objective(const QuadraticModel& model, const Vector& x) {
  require_dim(x.size(), model.dim(), "evaluate_objective");
  return 0.5 * x.dot(model.G() * x) + model.c().dot(x);
}

/// x̂ = [1, xᵀ]ᵀ.
inline Vector augment(const Vector& x) {
  Vector xh(x.size() + 1);
  xh(0) = 1.0;
  xh.tail(x.size()) = x;
  return xh;
}

inline AugmentedModel assemble_W(const QuadraticModel& model, double w00) {
  const Eigen::Index m = model.dim();
  Matrix w(m + 1, m + 1);
  w(0, 0) = w00;
  w.block(0, 1, 1, m) = model.c().transpose();
  w.block(1, 0, m, 1) = model.c();
  w.bottomRightCorner(m, m) = model.G();
  return AugmentedModel(std::move(w));
}

struct ExtractedModel {
  QuadraticModel model;
  double w00;
};

inline ExtractedModel extract_model(const AugmentedModel& aug) {
  const Eigen::Index m = aug.dim();
  const Matrix& w = aug.W();
  return {QuadraticModel(w.bottomRightCorner(m, m), w.block(1, 0, m, 1)), w(0, 0)};
}

/// x̂ᵀ W x̂ = w00 + 2cᵀx + xᵀGx.
inline double augmented_value(const AugmentedModel& aug, const Vector& x) {
  require_dim(x.size(), aug.dim(), "augmented_value");
  const Vector xh = augment(x);
  return xh.dot(aug.W() * xh);
}

/// Φ(G, c) = ½ Σ (½xᵢᵀGxᵢ + cᵀxᵢ − yᵢ)².
inline double phi_objective(const QuadraticModel& model, const Dataset& data) {
  require_dim(data.dim(), model.dim(), "phi_objective");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double r = evaluate_objective(model, data.point(i)) - data.value(i);
    sum += r * r;
  }
  return 0.5 * sum;
}

/// Q(W) = ½ Σ (x̂ᵢᵀWx̂ᵢ − 2yᵢ)²; equals 4Φ when w00 = 0.
inline double q_objective(const AugmentedModel& aug, const Dataset& data) {
  require_dim(data.dim(), aug.dim(), "q_objective");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double r = augmented_value(aug, data.point(i)) - 2.0 * data.value(i);
    sum += r * r;
  }
  return 0.5 * sum;
}

}  // namespace quadinv
