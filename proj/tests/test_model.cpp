#include <gtest/gtest.h>

#include <random>

#include "quadinv/datagen.hpp"
#include "quadinv/model.hpp"

using namespace quadinv;

namespace {

Matrix w1_printed() {
  Matrix w(3, 3);
  w << 0, 1, 2, 1, 2, 1, 2, 1, 2;
  return w;
}

QuadraticModel random_model(std::mt19937_64& rng, Eigen::Index m) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Matrix g(m, m);
  Vector c(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    c(i) = u(rng);
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = u(rng);
  }
  return QuadraticModel::symmetrized(g, c);
}

Dataset random_dataset(std::mt19937_64& rng, Eigen::Index m, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix pts(n, m);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = u(rng);
    for (Eigen::Index j = 0; j < m; ++j) pts(i, j) = u(rng);
  }
  return Dataset(pts, y);
}

}  // namespace

TEST(QuadraticModel, SymmetrizesWithinToleranceRejectsBeyond) {
  Matrix g(2, 2);
  g << 2, 1 + 1e-12, 1, 2;
  const QuadraticModel ok(g, Vector::Ones(2));
  EXPECT_EQ(ok.G(), ok.G().transpose());
  g(0, 1) = 1.5;
  EXPECT_THROW(QuadraticModel(g, Vector::Ones(2)), DataError);
  const auto sym = QuadraticModel::symmetrized(g, Vector::Ones(2));
  EXPECT_DOUBLE_EQ(sym.G()(0, 1), 1.25);
  EXPECT_THROW(QuadraticModel(Matrix::Identity(2, 2), Vector::Ones(3)), UsageError);
}

TEST(QuadraticModel, SymmetrizedObjectiveMatchesRawForm) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Matrix g(3, 3);
    for (auto& v : g.reshaped()) v = u(rng);
    const Vector c = Vector::NullaryExpr(3, [&] { return u(rng); });
    const Vector x = Vector::NullaryExpr(3, [&] { return u(rng); });
    const QuadraticModel model = QuadraticModel::symmetrized(g, c);
    EXPECT_NEAR(evaluate_objective(model, x), 0.5 * x.dot(g * x) + c.dot(x), 1e-14);
  }
}

TEST(EvaluateObjective, WorkedExamples) {
  const auto m1 = fixtures::example1_model();
  EXPECT_NEAR(evaluate_objective(m1, Vector{{0.0, -1.5}}), -0.75, 1e-15);
  EXPECT_NEAR(evaluate_objective(m1, Vector{{0.0, -1.8}}), -0.36, 1e-15);
  EXPECT_NEAR(evaluate_objective(fixtures::example2_model(), Vector{{0.25, 0.25, -1.25}}), -1.125, 1e-15);
  const QuadraticModel zero(Matrix::Zero(2, 2), Vector::Zero(2));
  EXPECT_EQ(evaluate_objective(zero, Vector{{3.0, -7.0}}), 0.0);
  EXPECT_THROW(evaluate_objective(m1, Vector::Ones(3)), UsageError);
}

TEST(Augment, PrependsOne) {
  EXPECT_EQ(augment(Vector{{3.0, 4.0}}), (Vector{{1.0, 3.0, 4.0}}));
  EXPECT_EQ(augment(Vector{{0.0, -1.5}}), (Vector{{1.0, 0.0, -1.5}}));
  EXPECT_EQ(augment(Vector{{-0.2}}), (Vector{{1.0, -0.2}}));
}

TEST(AssembleW, PrintedExactMatrices) {
  EXPECT_EQ(assemble_W(fixtures::example1_model(), 0.0).W(), w1_printed());
  Matrix w2(4, 4);
  w2 << 0, 1, 2, 3, 1, 4, 1, 2, 2, 1, 4, 3, 3, 2, 3, 4;
  EXPECT_EQ(assemble_W(fixtures::example2_model(), 0.0).W(), w2);
  EXPECT_EQ(assemble_W(QuadraticModel(Matrix::Zero(2, 2), Vector::Zero(2)), 0.0).W(), Matrix::Zero(3, 3));
}

TEST(ExtractModel, Examples) {
  const auto ex = extract_model(AugmentedModel(w1_printed()));
  EXPECT_EQ(ex.model.G(), fixtures::example1_model().G());
  EXPECT_EQ(ex.model.c(), fixtures::example1_model().c());
  EXPECT_EQ(ex.w00, 0.0);

  Matrix noisy(3, 3);
  noisy << 0.1843, 0.6311, 2.1355, 0.6311, 1.9466, 0.7979, 2.1355, 0.7979, 2.1058;
  const auto en = extract_model(AugmentedModel(noisy));
  EXPECT_DOUBLE_EQ(en.w00, 0.1843);
  EXPECT_DOUBLE_EQ(en.model.c()(1), 2.1355);
  EXPECT_DOUBLE_EQ(en.model.G()(1, 1), 2.1058);

  const auto id = extract_model(AugmentedModel(Matrix::Identity(3, 3)));
  EXPECT_EQ(id.model.G(), Matrix::Identity(2, 2));
  EXPECT_EQ(id.model.c(), Vector::Zero(2));
  EXPECT_EQ(id.w00, 1.0);

  Matrix asym = Matrix::Identity(3, 3);
  asym(0, 2) = 0.5;
  EXPECT_THROW(AugmentedModel{asym}, DataError);
}

TEST(ExtractModel, RoundTripIsExact) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < 100; ++t) {
    const auto model = random_model(rng, 1 + t % 4);
    const double w00 = u(rng);
    const AugmentedModel aug = assemble_W(model, w00);
    const auto ex = extract_model(aug);
    EXPECT_EQ(ex.model.G(), model.G());
    EXPECT_EQ(ex.model.c(), model.c());
    EXPECT_EQ(ex.w00, w00);
    EXPECT_EQ(assemble_W(ex.model, ex.w00).W(), aug.W());
  }
}

TEST(AugmentedValue, Examples) {
  EXPECT_NEAR(augmented_value(AugmentedModel(w1_printed()), Vector{{0.0, -1.5}}), -1.5, 1e-15);
  EXPECT_EQ(augmented_value(AugmentedModel(Matrix::Zero(3, 3)), Vector{{0.3, 0.7}}), 0.0);
  Matrix w = Matrix::Zero(3, 3);
  w(0, 0) = 1.0;
  EXPECT_EQ(augmented_value(AugmentedModel(w), Vector{{0.3, 0.7}}), 1.0);
}

TEST(AugmentedValue, ExpandsToOffsetPlusTwiceLinearPlusQuadratic) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index m = 1 + t % 4;
    const auto model = random_model(rng, m);
    const double w00 = u(rng);
    const Vector x = Vector::NullaryExpr(m, [&] { return u(rng); });
    const double expect = w00 + 2.0 * model.c().dot(x) + x.dot(model.G() * x);
    EXPECT_NEAR(augmented_value(assemble_W(model, w00), x), expect, 1e-12);
  }
}

TEST(PhiObjective, Examples) {
  const Fixture f = fixture("example1-exact");
  EXPECT_NEAR(phi_objective(f.model, f.data), 0.0, 1e-28);
  const QuadraticModel zero(Matrix::Zero(2, 2), Vector::Zero(2));
  EXPECT_DOUBLE_EQ(phi_objective(zero, Dataset(Matrix::Ones(1, 2), Vector::Constant(1, 2.0))), 2.0);
  const Dataset shifted(f.data.points(), f.data.values().array() + 1.0);
  EXPECT_NEAR(phi_objective(f.model, shifted), 10.0, 1e-12);
}

TEST(QObjective, Examples) {
  EXPECT_DOUBLE_EQ(q_objective(AugmentedModel(Matrix::Zero(3, 3)), Dataset(Matrix::Ones(1, 2), Vector::Ones(1))), 2.0);
  const Fixture f = fixture("example1-exact");
  EXPECT_NEAR(q_objective(AugmentedModel(w1_printed()), f.data), 0.0, 1e-27);
}

TEST(QObjective, FourTimesPhi) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 120; ++t) {
    const Eigen::Index m = 1 + t % 4;
    const auto model = random_model(rng, m);
    const Dataset data = random_dataset(rng, m, 1 + t % 30);
    const double phi = phi_objective(model, data);
    EXPECT_NEAR(q_objective(assemble_W(model, 0.0), data), 4.0 * phi, 1e-12 * std::max(1e-300, 4.0 * phi));
  }
}

TEST(Dataset, EmptyAndMismatchedAreRejected) {
  EXPECT_THROW(Dataset(Matrix(0, 2), Vector(0)), UsageError);
  EXPECT_THROW(Dataset(Matrix::Ones(3, 2), Vector::Ones(2)), UsageError);
  Matrix bad = Matrix::Ones(2, 2);
  bad(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Dataset(bad, Vector::Ones(2)), DataError);
}

TEST(ConstraintSet, Shapes) {
  EXPECT_EQ(ConstraintSet::none(3).size(), 0);
  EXPECT_EQ(ConstraintSet::none(3).dim(), 3);
  EXPECT_THROW(ConstraintSet(Matrix::Ones(2, 2), Vector::Ones(3)), UsageError);
}
