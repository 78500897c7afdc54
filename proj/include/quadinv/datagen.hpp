#pragma once

// Synthetic data around a known model, controlled perturbation, the embedded
// worked examples, and the conditioning study of the assembled system.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quadinv/densela.hpp"
#include "quadinv/inverse.hpp"
#include "quadinv/model.hpp"

namespace quadinv {

// ---------------------------------------------------------------------------
// Random streams

inline constexpr std::string_view kGeneratorName = "splitmix64";

/// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline constexpr double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Counter-based draw keyed by (seed, a, b); every key is an independent stream element.
inline double keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t h = mix64(seed + golden);
  h = mix64(h ^ (a + golden));
  h = mix64(h ^ (b + 2 * golden));
  return to_unit(h);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * to_unit(next()); }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Forward generation and noise

inline Dataset forward_values(const QuadraticModel& model, const Matrix& points) {
  require_dim(points.cols(), model.dim(), "forward_values");
  Vector y(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) y(i) = evaluate_objective(model, points.row(i).transpose());
  return Dataset(points, std::move(y));
}

struct NoiseSpec {
  double x_amplitude = 0.0;
  double y_amplitude = 0.0;
  std::optional<int> rounding_decimals;
  std::uint64_t seed = 0;

  void validate() const {
    if (!std::isfinite(x_amplitude) || !std::isfinite(y_amplitude) || x_amplitude < 0 || y_amplitude < 0)
      throw UsageError("NoiseSpec: amplitudes must be finite and >= 0");
    if (rounding_decimals && (*rounding_decimals < 0 || *rounding_decimals > 12))
      throw UsageError("NoiseSpec: rounding_decimals must be in [0, 12]");
  }
};

inline double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

/// Coordinate j of sample i moves by a uniform draw in [-amp, amp] keyed by
/// (seed, i, j); y_i uses key (seed, i, m). Rounding applies afterwards.
inline Dataset perturb(const Dataset& data, const NoiseSpec& noise) {
  noise.validate();
  const Eigen::Index m = data.dim();
  Matrix pts = data.points();
  Vector vals = data.values();
  auto shift = [&](double& v, double amp, Eigen::Index i, Eigen::Index j) {
    if (amp > 0.0)
      v += amp * (2.0 * keyed_uniform(noise.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)) - 1.0);
    if (noise.rounding_decimals) v = round_to(v, *noise.rounding_decimals);
  };
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < m; ++j) shift(pts(i, j), noise.x_amplitude, i, j);
    shift(vals(i), noise.y_amplitude, i, m);
  }
  return Dataset(std::move(pts), std::move(vals));
}

// ---------------------------------------------------------------------------
// Embedded worked examples

struct FixtureMetadata {
  bool partial = false;
  // y regenerated from the model rather than taken from the printed table.
  bool y_regenerated = false;
  // Printed y values, in dataset order, for cross-checking regenerated ones.
  std::vector<double> printed_y;
  // Zero-based observation indices whose x was reconstructed, not printed.
  std::vector<Eigen::Index> reconstructed_columns;
  std::vector<std::string> notes;
};

struct Fixture {
  std::string name;
  Dataset data;
  QuadraticModel model;
  ConstraintSet constraints;
  FixtureMetadata meta;
};

inline const std::array<std::string_view, 4>& fixture_names() {
  static const std::array<std::string_view, 4> names{"example1-exact", "example1-noisy", "example2-exact",
                                                     "example2-noisy"};
  return names;
}

namespace fixtures {

inline QuadraticModel example1_model() {
  Matrix g(2, 2);
  g << 2, 1, 1, 2;
  return QuadraticModel(g, Vector{{1.0, 2.0}});
}

inline ConstraintSet example1_constraints() {
  Matrix a(2, 2);
  a << 1, 2, 1, 3;
  return ConstraintSet(a, Vector{{-3.0, -4.0}});
}

inline QuadraticModel example2_model() {
  Matrix g(3, 3);
  g << 4, 1, 2, 1, 4, 3, 2, 3, 4;
  return QuadraticModel(g, Vector{{1.0, 2.0, 3.0}});
}

inline ConstraintSet example2_constraints() {
  Matrix a(3, 3);
  a << 1, 2, 3, 1, 3, 4, 1, 4, 5;
  return ConstraintSet(a, Vector{{-3.0, -4.0, -5.0}});
}

// Example 1 points. The printed table has 19 columns against 20 values;
// column 18 (zero-based 17) is (-0.2, -1.5), the only insertion that makes
// every printed value agree with the model.
inline constexpr Eigen::Index kExample1ReconstructedColumn = 17;

inline Matrix example1_points() {
  static constexpr std::array<double, 20> x1{0,    0.1,  0.1,  0.1,  0,    0.2,  0.2, -0.1, -0.1, 0,
                                             0.2,  0.4,  -0.1, -0.1, -0.2, -0.2, -0.2, -0.2, 0,    0.3};
  static constexpr std::array<double, 20> x2{-1.8, -1.8, -1.7, -1.6, -1.7, -1.6, -1.7, -1.5, -1.6, -1.6,
                                             -1.8, -1.8, -1.7, -1.8, -1.8, -1.7, -1.6, -1.5, -1.5, -1.7};
  Matrix pts(20, 2);
  for (Eigen::Index i = 0; i < 20; ++i) pts.row(i) << x1[i], x2[i];
  return pts;
}

inline std::vector<double> example1_printed_y() {
  return {-0.36, -0.43, -0.57, -0.69, -0.51, -0.72, -0.61, -0.69, -0.57, -0.64,
          -0.48, -0.52, -0.43, -0.27, -0.16, -0.33, -0.48, -0.61, -0.75, -0.63};
}

inline Matrix example2_points() {
  static constexpr std::array<double, 20> x1{0.2, 0.1, 0.2, 0.3, 0.1, 0, 0.3, 0, 0.3, 0,
                                             0.2, 0,   0.1, 0,   0,   0.2, 0, 0, 0.2, 0};
  static constexpr std::array<double, 20> x2{0.2, 0.1, 0.2, 0.3, 0, 0.1, 0, 0.3, 0, 0,
                                             0,   0.1, 0,   0.1, 0, 0,   0.2, 0, 0, 0.2};
  static constexpr std::array<double, 20> x3{-1.3, -1.4, -1.4, -1.4, -1.3, -1.3, -1.3, -1.3, -1.2, -1.1,
                                             -1.1, -1.1, -1.2, -1.2, -1.2, -1.2, -1.2, -1.3, -1.3, -1.3};
  Matrix pts(20, 3);
  for (Eigen::Index i = 0; i < 20; ++i) pts.row(i) << x1[i], x2[i], x3[i];
  return pts;
}

inline std::vector<double> example2_printed_y() {
  return {-1.02, -0.63, -0.88, -1.03, -0.66, -0.69, -0.82, -0.91, -0.96, -0.88,
          -1.04, -0.99, -0.84, -0.86, -0.72, -0.92, -0.96, -0.52, -0.76, -0.82};
}

// Distorted data: only the first coordinate row and the values are printed.
inline std::vector<double> example1_noisy_x1() {
  return {0.01, 0.11, 0.11, 0.11, 0,    0.19, 0.21, -0.09, -0.1,  0.01,
          0.2,  0.41, -0.09, -0.09, -0.2, -0.2, -0.19, -0.19, -0.01, 0.3};
}

inline std::vector<double> example1_noisy_y() {
  return {-0.36, -0.42, -0.57, -0.68, -0.51, -0.71, -0.61, -0.68, -0.56, -0.63,
          -0.48, -0.52, -0.43, -0.26, -0.16, -0.32, -0.47, -0.6,  -0.75, -0.63};
}

inline std::vector<double> example2_noisy_x1() {
  return {0.21, 0.11, 0.2,  0.3,  0.1,  0, 0.3, 0.01, 0.3,  0,
          0.2,  0.01, 0.11, 0.01, 0.01, 0.2, 0, 0,    0.21, 0};
}

inline std::vector<double> example2_noisy_y() {
  return {-1.02, -0.63, -0.87, -1.02, -0.65, -0.69, -0.81, -0.9,  -0.96, -0.88,
          -1.04, -0.98, -0.84, -0.85, -0.71, -0.92, -0.96, -0.51, -0.75, -0.81};
}

inline Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Fixture exact(std::string name, const QuadraticModel& model, const ConstraintSet& cons, const Matrix& pts,
                     std::vector<double> printed) {
  FixtureMetadata meta;
  meta.y_regenerated = true;
  meta.printed_y = std::move(printed);
  meta.notes.push_back("y regenerated from the generating model at the printed points");
  return Fixture{std::move(name), forward_values(model, pts), model, cons, std::move(meta)};
}

inline Fixture noisy(std::string name, const Fixture& base, const std::vector<double>& x1,
                     const std::vector<double>& y) {
  Matrix pts = base.data.points();
  pts.col(0) = to_vector(x1);
  FixtureMetadata meta;
  meta.partial = true;
  meta.printed_y = y;
  meta.notes.push_back("only coordinate row 1 of the distorted points is printed; rows 2.." +
                       std::to_string(base.data.dim()) + " are taken from the exact fixture");
  return Fixture{std::move(name), Dataset(std::move(pts), to_vector(y)), base.model, base.constraints,
                 std::move(meta)};
}

}  // namespace fixtures

inline Fixture fixture(std::string_view name) {
  using namespace fixtures;
  auto ex1 = [] {
    Fixture f = exact("example1-exact", example1_model(), example1_constraints(), example1_points(),
                      example1_printed_y());
    f.meta.reconstructed_columns.push_back(kExample1ReconstructedColumn);
    f.meta.notes.push_back("observation 18 is (-0.2, -1.5), reconstructed: the printed x table omits one column");
    return f;
  };
  auto ex2 = [] {
    return exact("example2-exact", example2_model(), example2_constraints(), example2_points(),
                 example2_printed_y());
  };
  if (name == "example1-exact") return ex1();
  if (name == "example2-exact") return ex2();
  if (name == "example1-noisy") return noisy("example1-noisy", ex1(), example1_noisy_x1(), example1_noisy_y());
  if (name == "example2-noisy") return noisy("example2-noisy", ex2(), example2_noisy_x1(), example2_noisy_y());
  std::string valid;
  for (auto n : fixture_names()) valid += (valid.empty() ? "" : ", ") + std::string(n);
  throw UsageError("unknown fixture '" + std::string(name) + "' (valid: " + valid + ")");
}

// ---------------------------------------------------------------------------
// Conditioning study

struct StudyConfig {
  Eigen::Index m = 2;
  std::vector<Eigen::Index> n_values;
  int trials = 1;
  std::uint64_t seed = 0;
  double center = 0.0;      // every coordinate of the sampling box center
  double half_width = 1.0;  // points are uniform in center ± half_width
  NoiseSpec noise;          // seed field ignored; each trial uses its own seed
  Solver solver = PseudoinverseSolver{};
};

struct StudyRow {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  int trial = 0;
  bool failed = false;
  Eigen::Index rank = 0;
  double cond = 0.0;
  double recovery_error = 0.0;
  std::string failure;
};

struct StudyReport {
  std::uint64_t seed = 0;
  std::string generator{kGeneratorName};
  std::string solver;
  std::vector<StudyRow> rows;

  /// Median effective condition number over successful trials for each N, in N order.
  std::vector<std::pair<Eigen::Index, double>> median_cond() const {
    std::vector<std::pair<Eigen::Index, double>> out;
    for (std::size_t i = 0; i < rows.size();) {
      std::size_t j = i;
      std::vector<double> vals;
      for (; j < rows.size() && rows[j].m == rows[i].m && rows[j].n == rows[i].n; ++j)
        if (!rows[j].failed) vals.push_back(rows[j].cond);
      if (!vals.empty()) {
        std::sort(vals.begin(), vals.end());
        const std::size_t h = vals.size() / 2;
        out.emplace_back(rows[i].n, vals.size() % 2 ? vals[h] : 0.5 * (vals[h - 1] + vals[h]));
      }
      i = j;
    }
    return out;
  }

  bool all_failed() const {
    return std::all_of(rows.begin(), rows.end(), [](const StudyRow& r) { return r.failed; });
  }
};

inline std::uint64_t trial_seed(std::uint64_t base, int trial, Eigen::Index n) {
  return base + static_cast<std::uint64_t>(trial) + 1000003ULL * static_cast<std::uint64_t>(n);
}

/// Random model with G, c entries uniform in [-2, 2] (G symmetrized).
inline QuadraticModel random_model(SplitMix64& rng, Eigen::Index m) {
  Matrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = rng.uniform(-2.0, 2.0);
  Vector c(m);
  for (Eigen::Index i = 0; i < m; ++i) c(i) = rng.uniform(-2.0, 2.0);
  return QuadraticModel::symmetrized(g, std::move(c));
}

inline StudyRow run_trial(const StudyConfig& cfg, Eigen::Index n, int trial) {
  StudyRow row{cfg.m, n, trial};
  const std::uint64_t seed = trial_seed(cfg.seed, trial, n);
  SplitMix64 rng(seed);
  try {
    const QuadraticModel truth = random_model(rng, cfg.m);
    Matrix pts(n, cfg.m);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < cfg.m; ++j)
        pts(i, j) = rng.uniform(cfg.center - cfg.half_width, cfg.center + cfg.half_width);
    Dataset data = forward_values(truth, pts);
    NoiseSpec noise = cfg.noise;
    noise.seed = seed;
    if (noise.x_amplitude > 0 || noise.y_amplitude > 0 || noise.rounding_decimals) data = perturb(data, noise);
    const FitResult fr = fit(data, cfg.solver);
    row.rank = fr.rank;
    row.cond = fr.cond;
    row.recovery_error = densela::max_abs(Matrix(fr.W.W() - assemble_W(truth, 0.0).W()));
  } catch (const std::exception& e) {
    row.failed = true;
    row.failure = e.what();
  }
  return row;
}

inline StudyReport condition_study(const StudyConfig& cfg) {
  if (cfg.m < 1) throw UsageError("condition_study: m must be >= 1");
  if (cfg.trials < 1) throw UsageError("condition_study: trials must be >= 1");
  if (cfg.n_values.empty()) throw UsageError("condition_study: empty N range");
  for (auto n : cfg.n_values)
    if (n < 1) throw UsageError("condition_study: every N must be >= 1");
  cfg.noise.validate();

  StudyReport rep;
  rep.seed = cfg.seed;
  rep.solver = solver_tag(cfg.solver);
  std::vector<Eigen::Index> ns = cfg.n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  for (auto n : ns)
    for (int t = 0; t < cfg.trials; ++t) rep.rows.push_back(run_trial(cfg, n, t));
  return rep;
}

}  // namespace quadinv
