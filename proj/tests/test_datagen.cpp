#include <gtest/gtest.h>

#include "quadinv/datagen.hpp"

using namespace quadinv;

TEST(ForwardValues, WorkedExamples) {
  const auto d = forward_values(fixtures::example1_model(), Matrix{{0.0, -1.8}, {0.3, -1.7}});
  EXPECT_NEAR(d.value(0), -0.36, 1e-15);
  EXPECT_NEAR(d.value(1), -0.63, 1e-15);
  EXPECT_THROW(forward_values(fixtures::example1_model(), Matrix::Ones(2, 3)), UsageError);
}

TEST(Perturb, ZeroAmplitudeIsIdentity) {
  const Fixture f = fixture("example2-exact");
  const Dataset p = perturb(f.data, NoiseSpec{0.0, 0.0, std::nullopt, 99});
  EXPECT_TRUE(p.points() == f.data.points());
  EXPECT_TRUE(p.values() == f.data.values());
}

TEST(Perturb, RoundingAndBounds) {
  const Dataset d(Matrix{{0.123, -0.456}}, Vector{{0.125001}});
  const Dataset r = perturb(d, NoiseSpec{0.0, 0.0, 2, 0});
  EXPECT_DOUBLE_EQ(r.points()(0, 0), 0.12);
  EXPECT_DOUBLE_EQ(r.points()(0, 1), -0.46);
  EXPECT_DOUBLE_EQ(r.value(0), 0.13);

  const Fixture f = fixture("example1-exact");
  const Dataset n = perturb(f.data, NoiseSpec{0.01, 0.02, std::nullopt, 5});
  EXPECT_LE((n.points() - f.data.points()).cwiseAbs().maxCoeff(), 0.01);
  EXPECT_LE((n.values() - f.data.values()).cwiseAbs().maxCoeff(), 0.02);
  EXPECT_GT((n.points() - f.data.points()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(perturb(f.data, NoiseSpec{-1.0, 0.0, std::nullopt, 0}), UsageError);
  EXPECT_THROW(perturb(f.data, NoiseSpec{0.0, 0.0, 13, 0}), UsageError);
}

TEST(Perturb, SeedDeterminesOutput) {
  const Fixture f = fixture("example1-exact");
  const NoiseSpec a{0.01, 0.01, std::nullopt, 42};
  NoiseSpec b = a;
  b.seed = 43;
  EXPECT_TRUE(perturb(f.data, a).points() == perturb(f.data, a).points());
  EXPECT_TRUE(perturb(f.data, a).values() == perturb(f.data, a).values());
  EXPECT_FALSE(perturb(f.data, a).points() == perturb(f.data, b).points());
}

TEST(SplitMix64, KnownSequenceAndRange) {
  // Reference outputs of splitmix64 seeded with 0.
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-2.0, 3.0);
    EXPECT_GE(u, -2.0);
    EXPECT_LT(u, 3.0);
  }
}

TEST(Fixtures, ExactFixturesMatchPrintedValues) {
  for (auto name : {"example1-exact", "example2-exact"}) {
    const Fixture f = fixture(name);
    EXPECT_FALSE(f.meta.partial);
    EXPECT_TRUE(f.meta.y_regenerated);
    ASSERT_EQ(static_cast<Eigen::Index>(f.meta.printed_y.size()), f.data.size());
    EXPECT_EQ(f.data.size(), 20);
    for (Eigen::Index i = 0; i < f.data.size(); ++i)
      EXPECT_NEAR(f.data.value(i), f.meta.printed_y[static_cast<std::size_t>(i)], 1e-12) << name << " row " << i;
  }
  const Fixture e1 = fixture("example1-exact");
  EXPECT_EQ(e1.meta.reconstructed_columns, std::vector<Eigen::Index>{fixtures::kExample1ReconstructedColumn});
  EXPECT_EQ(e1.data.point(17), (Vector{{-0.2, -1.5}}));
  EXPECT_TRUE(fixture("example2-exact").meta.reconstructed_columns.empty());
}

TEST(Fixtures, NoisyFixturesArePartial) {
  for (auto [name, base] : {std::pair{"example1-noisy", "example1-exact"}, std::pair{"example2-noisy", "example2-exact"}}) {
    const Fixture f = fixture(name);
    const Fixture e = fixture(base);
    EXPECT_TRUE(f.meta.partial);
    EXPECT_FALSE(f.meta.y_regenerated);
    EXPECT_FALSE(f.meta.notes.empty());
    EXPECT_EQ(f.data.size(), e.data.size());
    EXPECT_TRUE(f.data.points().rightCols(e.data.dim() - 1) == e.data.points().rightCols(e.data.dim() - 1));
    EXPECT_LE((f.data.points().col(0) - e.data.points().col(0)).cwiseAbs().maxCoeff(), 0.02);
  }
  EXPECT_THROW(fixture("example3"), UsageError);
}

TEST(ConditionStudy, FullRankAndDeficientRows) {
  StudyConfig cfg;
  cfg.m = 2;
  cfg.n_values = {9, 3};
  cfg.trials = 3;
  cfg.seed = 7;
  const StudyReport rep = condition_study(cfg);
  ASSERT_EQ(rep.rows.size(), 6u);
  EXPECT_EQ(rep.rows.front().n, 3);  // sorted by N
  for (const auto& r : rep.rows) {
    ASSERT_FALSE(r.failed) << r.failure;
    if (r.n == 9) {
      EXPECT_EQ(r.rank, 6);
      EXPECT_LE(r.recovery_error, 1e-8);
    } else {
      EXPECT_LE(r.rank, 3);
      EXPECT_GT(r.recovery_error, 0.0);
    }
    EXPECT_GE(r.cond, 1.0);
  }
  EXPECT_EQ(rep.generator, "splitmix64");
  EXPECT_EQ(rep.solver, "pseudoinverse");
  EXPECT_EQ(rep.median_cond().size(), 2u);
}

TEST(ConditionStudy, DeterministicForFixedSeed) {
  StudyConfig cfg;
  cfg.m = 3;
  cfg.n_values = {14, 20, 30};
  cfg.trials = 4;
  cfg.seed = 11;
  cfg.noise = NoiseSpec{1e-3, 1e-3, std::nullopt, 0};
  const auto a = condition_study(cfg);
  const auto b = condition_study(cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].cond, b.rows[i].cond);
    EXPECT_EQ(a.rows[i].recovery_error, b.rows[i].recovery_error);
  }
}

TEST(ConditionStudy, ErrorShrinksWithNoise) {
  for (Eigen::Index m : {2, 3}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      StudyConfig cfg;
      cfg.m = m;
      cfg.n_values = {5 * (m + 1) * (m + 1)};
      cfg.trials = 10;
      cfg.seed = 3;
      cfg.noise = NoiseSpec{eps, eps, std::nullopt, 0};
      const auto rep = condition_study(cfg);
      std::vector<double> errs;
      for (const auto& r : rep.rows) errs.push_back(r.recovery_error);
      std::sort(errs.begin(), errs.end());
      const double median = 0.5 * (errs[4] + errs[5]);
      EXPECT_LT(median, prev) << "m=" << m << " eps=" << eps;
      prev = median;
    }
  }
}

TEST(ConditionStudy, RankNeverExceedsBound) {
  StudyConfig cfg;
  cfg.m = 2;
  for (Eigen::Index n = 1; n <= 20; ++n) cfg.n_values.push_back(n);
  cfg.trials = 2;
  for (const auto& r : condition_study(cfg).rows) EXPECT_LE(r.rank, std::min<Eigen::Index>(r.n, symmetric_dim(2)));
}

TEST(ConditionStudy, RejectsBadConfig) {
  StudyConfig cfg;
  EXPECT_THROW(condition_study(cfg), UsageError);  // empty N range
  cfg.n_values = {5};
  cfg.trials = 0;
  EXPECT_THROW(condition_study(cfg), UsageError);
}
