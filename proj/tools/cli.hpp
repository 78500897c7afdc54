#pragma once

// quadinv command-line front end. run() is the whole program minus main(), so
// tests can drive it in-process against string streams.
//
// Exit codes: 0 ok, 1 usage, 2 malformed or unreadable data, 3 numerical failure.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quadinv.hpp"

namespace quadinv::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct SolverFlags {
  std::string name = "pinv";
  double lambda = 0.0;
  std::optional<double> rank_tol;

  void attach(CLI::App* cmd) {
    cmd->add_option("--solver", name, "pinv or tikhonov")->check(CLI::IsMember({"pinv", "tikhonov"}));
    cmd->add_option("--lambda", lambda, "ridge parameter for --solver tikhonov")->check(CLI::NonNegativeNumber);
    cmd->add_option("--rank-tol", rank_tol, "singular values at or below this are discarded (pinv)")
        ->check(CLI::NonNegativeNumber);
  }

  Solver solver() const {
    if (name == "tikhonov") return TikhonovSolver{lambda};
    return PseudoinverseSolver{rank_tol};
  }
};

class Printer {
 public:
  Printer(std::ostream& out, bool full) : out_(out), full_(full) {}

  std::string num(double v) const { return io::format_number(v, full_); }
  std::string vec(const Vector& v) const { return v.size() ? io::format_vector(v, full_) : "none"; }

  void kv(const std::string& key, const std::string& value) { out_ << key << "=" << value << "\n"; }
  void kv(const std::string& key, double v) { kv(key, num(v)); }
  void kv(const std::string& key, Eigen::Index v) { kv(key, std::to_string(v)); }
  void kv(const std::string& key, const Vector& v) { kv(key, vec(v)); }
  void matrix(const std::string& key, const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) kv(key + "[" + std::to_string(r) + "]", Vector(m.row(r).transpose()));
  }
  void indices(const std::string& key, const std::vector<Eigen::Index>& idx) {
    std::string s;
    for (auto i : idx) s += (s.empty() ? "" : " ") + std::to_string(i);
    kv(key, s.empty() ? "none" : s);
  }

  void table(const std::string& title, const Matrix& m) {
    out_ << title << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out_ << "  ";
      for (Eigen::Index c = 0; c < m.cols(); ++c) out_ << std::setw(11) << std::fixed << std::setprecision(4) << m(r, c);
      out_ << "\n";
    }
    out_ << std::defaultfloat;
  }

 private:
  std::ostream& out_;
  bool full_;
};

namespace detail {

inline std::vector<double> parse_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  for (auto cell : io::detail::split(s)) {
    const auto v = io::detail::parse_double(cell);
    if (!v) throw UsageError(std::string(flag) + ": cannot parse '" + std::string(cell) + "'");
    out.push_back(*v);
  }
  return out;
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("QUADINV_SEED"); env && *env) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("QUADINV_SEED is not an unsigned integer");
    return v;
  }
  return 0;
}

inline void emit(std::ostream& out, const std::optional<std::string>& path, const std::string& content) {
  if (path && *path != "-")
    io::write_file(*path, content);
  else
    out << content;
}

inline QuadraticModel require_model(const io::ProblemDoc& doc, const std::string& path) {
  if (!doc.model) throw DataError(path + ": missing model keys 'G' and 'c'");
  return *doc.model;
}

inline void print_fit(Printer& p, const Dataset& data, const FitResult& fr) {
  p.kv("N", data.size());
  p.kv("m", data.dim());
  p.kv("solver", fr.solver_used);
  p.kv("rank", fr.rank);
  p.kv("augmented_rank", fr.augmented_rank);
  p.kv("consistent", fr.rank == fr.augmented_rank ? "true" : "false");
  p.kv("cond", fr.cond);
  p.kv("phi", fr.phi_residual);
  p.kv("q", fr.q_residual);
  p.kv("w00", fr.w00);
  p.kv("c", fr.model.c());
  p.matrix("G", fr.model.G());
  p.matrix("W", fr.W.W());
}

inline void print_qp(Printer& p, const QuadraticModel& model, const ConstraintSet& cons, const QpSolution& sol) {
  const KktReport rep = kkt_residual(model, cons, sol);
  p.kv("x_star", sol.x_star);
  p.kv("f_star", sol.f_star);
  p.indices("active_set", sol.active_set);
  p.indices("working_set", sol.working_set);
  p.kv("multipliers", sol.multipliers);
  p.kv("feasibility_violation", rep.max_feasibility_violation);
  p.kv("stationarity_residual", rep.max_stationarity);
  p.kv("singular_kkt_skips", static_cast<Eigen::Index>(sol.singular_skips));
}

inline void warn_rank(std::ostream& err, const Dataset& data, const FitResult& fr) {
  if (fr.rank < symmetric_dim(data.dim()))
    err << "warning: left matrix is rank deficient (rank " << fr.rank << " < " << symmetric_dim(data.dim())
        << "); the minimum-norm solution is reported\n";
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recover quadratic objectives from observations and solve the reconstructed QP", "quadinv"};
  app.set_version_flag("--version", std::string("quadinv ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  bool full = false;
  bool pretty = false;
  app.add_flag("--full-precision", full, "print numbers with 17 significant digits")->group("Output");
  app.add_flag("--pretty", pretty, "append human-readable tables")->group("Output");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit (G, c, w00) to a dataset CSV");
  std::string fit_data;
  std::optional<std::string> fit_out;
  SolverFlags fit_solver;
  fit_cmd->add_option("--data", fit_data, "dataset CSV")->required();
  fit_cmd->add_option("--out", fit_out, "write the fitted model JSON here");
  fit_solver.attach(fit_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate Phi and Q of a model on a dataset");
  std::string eval_model, eval_data;
  bool per_point = false;
  eval_cmd->add_option("--model", eval_model, "model JSON")->required();
  eval_cmd->add_option("--data", eval_data, "dataset CSV")->required();
  eval_cmd->add_flag("--per-point", per_point, "print each residual f(x_i) - y_i");

  // qp
  auto* qp_cmd = app.add_subcommand("qp", "solve min 1/2 x'Gx + c'x subject to Ax <= b");
  std::string qp_problem;
  qp_cmd->add_option("--problem", qp_problem, "problem JSON with G, c and optionally A, b")->required();

  // reconstruct
  auto* rec_cmd = app.add_subcommand("reconstruct", "fit a dataset, then solve the QP under given constraints");
  std::string rec_data, rec_cons;
  SolverFlags rec_solver;
  rec_cmd->add_option("--data", rec_data, "dataset CSV")->required();
  rec_cmd->add_option("--constraints", rec_cons, "JSON with A and b")->required();
  rec_solver.attach(rec_cmd);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generate a dataset from a model");
  std::string gen_model;
  std::optional<std::string> gen_points, gen_out, gen_center;
  std::optional<Eigen::Index> gen_sample;
  double gen_half_width = 1.0, gen_noise = 0.0;
  std::optional<int> gen_round;
  std::optional<std::uint64_t> gen_seed;
  gen_cmd->add_option("--model", gen_model, "model JSON")->required();
  auto* points_opt = gen_cmd->add_option("--points", gen_points, "CSV of points (header x1..xm, optional y ignored)");
  auto* sample_opt = gen_cmd->add_option("--sample", gen_sample, "draw this many points uniformly in a box")
                         ->check(CLI::PositiveNumber);
  points_opt->excludes(sample_opt);
  gen_cmd->add_option("--center", gen_center, "box center, comma separated (default origin)");
  gen_cmd->add_option("--half-width", gen_half_width, "box half width")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--noise", gen_noise, "uniform noise amplitude on x and y")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--round", gen_round, "round x and y to this many decimals")->check(CLI::Range(0, 12));
  gen_cmd->add_option("--seed", gen_seed, "random seed (default $QUADINV_SEED or 0)");
  gen_cmd->add_option("--out", gen_out, "output CSV (default stdout)");

  // study
  auto* study_cmd = app.add_subcommand("study", "condition number of the fitting system versus N");
  Eigen::Index st_m = 2, st_nmin = 1, st_nmax = 1, st_nstep = 1;
  int st_trials = 20;
  std::optional<std::uint64_t> st_seed;
  std::optional<std::string> st_out;
  double st_noise = 0.0, st_center = 0.0, st_half = 1.0;
  std::optional<int> st_round;
  SolverFlags st_solver;
  study_cmd->add_option("--m", st_m, "dimension")->required()->check(CLI::PositiveNumber);
  study_cmd->add_option("--n-min", st_nmin, "smallest N")->required()->check(CLI::PositiveNumber);
  study_cmd->add_option("--n-max", st_nmax, "largest N")->required()->check(CLI::PositiveNumber);
  study_cmd->add_option("--n-step", st_nstep, "N increment")->check(CLI::PositiveNumber);
  study_cmd->add_option("--trials", st_trials, "trials per N")->check(CLI::PositiveNumber);
  study_cmd->add_option("--seed", st_seed, "base seed (default $QUADINV_SEED or 0)");
  study_cmd->add_option("--noise", st_noise, "uniform noise amplitude on x and y")->check(CLI::NonNegativeNumber);
  study_cmd->add_option("--round", st_round, "round x and y to this many decimals")->check(CLI::Range(0, 12));
  study_cmd->add_option("--center", st_center, "sampling box center (every coordinate)");
  study_cmd->add_option("--half-width", st_half, "sampling box half width")->check(CLI::NonNegativeNumber);
  study_cmd->add_option("--out", st_out, "output CSV (default stdout)");
  st_solver.attach(study_cmd);

  // fixtures
  auto* fx_cmd = app.add_subcommand("fixtures", "export an embedded worked example");
  std::string fx_name, fx_dir = ".";
  fx_cmd->add_option("--name", fx_name, "example1-exact, example1-noisy, example2-exact or example2-noisy")->required();
  fx_cmd->add_option("--out-dir", fx_dir, "directory for the exported files");

  std::vector<std::string> argv_store{"quadinv"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  Printer p(out, full);
  try {
    if (*fit_cmd) {
      const Dataset data = io::read_dataset(fit_data);
      const FitResult fr = fit(data, fit_solver.solver());
      detail::warn_rank(err, data, fr);
      detail::print_fit(p, data, fr);
      if (pretty) p.table("W", fr.W.W());
      if (fit_out) io::write_file(*fit_out, io::format_problem(&fr.model, fr.w00, nullptr));
    } else if (*eval_cmd) {
      const io::ProblemDoc doc = io::read_problem(eval_model);
      const QuadraticModel model = detail::require_model(doc, eval_model);
      const Dataset data = io::read_dataset(eval_data);
      if (data.dim() != model.dim())
        throw DataError("dataset dimension " + std::to_string(data.dim()) + " does not match model dimension " +
                        std::to_string(model.dim()));
      p.kv("N", data.size());
      p.kv("phi", phi_objective(model, data));
      p.kv("q", q_objective(assemble_W(model, doc.w00), data));
      if (per_point)
        for (Eigen::Index i = 0; i < data.size(); ++i)
          p.kv("residual[" + std::to_string(i) + "]", evaluate_objective(model, data.point(i)) - data.value(i));
    } else if (*qp_cmd) {
      const io::ProblemDoc doc = io::read_problem(qp_problem);
      const QuadraticModel model = detail::require_model(doc, qp_problem);
      const ConstraintSet cons = doc.constraints.value_or(ConstraintSet::none(model.dim()));
      const QpSolution sol = solve_qp(model, cons);
      detail::print_qp(p, model, cons, sol);
      if (pretty) p.table("x_star", Matrix(sol.x_star.transpose()));
    } else if (*rec_cmd) {
      const Dataset data = io::read_dataset(rec_data);
      const io::ProblemDoc doc = io::read_problem(rec_cons);
      if (!doc.constraints) throw DataError(rec_cons + ": missing constraint keys 'A' and 'b'");
      if (doc.constraints->dim() != data.dim())
        throw DataError(rec_cons + ": constraint dimension does not match the dataset");
      const Reconstruction rec = reconstruct(data, *doc.constraints, rec_solver.solver());
      for (const auto& w : rec.warnings) err << "warning: " << w << "\n";
      detail::print_fit(p, data, rec.fit);
      p.kv("min_eigenvalue_G", rec.min_eigenvalue);
      p.kv("convex", rec.convex ? "true" : "false");
      detail::print_qp(p, rec.fit.model, *doc.constraints, rec.qp);
      p.kv("f_star_with_offset", rec.f_star_with_offset);
      if (pretty) {
        p.table("W", rec.fit.W.W());
        p.table("x_star", Matrix(rec.qp.x_star.transpose()));
      }
    } else if (*gen_cmd) {
      const io::ProblemDoc doc = io::read_problem(gen_model);
      const QuadraticModel model = detail::require_model(doc, gen_model);
      const std::uint64_t seed = detail::resolve_seed(gen_seed);
      Matrix pts;
      if (gen_points) {
        pts = io::parse_point_table(io::read_file(*gen_points), *gen_points, false).points;
      } else if (gen_sample) {
        Vector center = Vector::Zero(model.dim());
        if (gen_center) {
          const auto c = detail::parse_list(*gen_center, "--center");
          if (static_cast<Eigen::Index>(c.size()) != model.dim())
            throw UsageError("--center needs " + std::to_string(model.dim()) + " values");
          for (Eigen::Index j = 0; j < model.dim(); ++j) center(j) = c[static_cast<std::size_t>(j)];
        }
        SplitMix64 rng(seed);
        pts.resize(*gen_sample, model.dim());
        for (Eigen::Index i = 0; i < *gen_sample; ++i)
          for (Eigen::Index j = 0; j < model.dim(); ++j)
            pts(i, j) = rng.uniform(center(j) - gen_half_width, center(j) + gen_half_width);
      } else {
        throw UsageError("gen: one of --points or --sample is required");
      }
      if (pts.cols() != model.dim())
        throw DataError("points have dimension " + std::to_string(pts.cols()) + ", model has " +
                        std::to_string(model.dim()));
      Dataset data = forward_values(model, pts);
      if (gen_noise > 0 || gen_round) data = perturb(data, NoiseSpec{gen_noise, gen_noise, gen_round, seed});
      detail::emit(out, gen_out, io::format_dataset(data));
    } else if (*study_cmd) {
      if (st_nmin > st_nmax) throw UsageError("study: --n-min exceeds --n-max");
      StudyConfig cfg;
      cfg.m = st_m;
      for (Eigen::Index n = st_nmin; n <= st_nmax; n += st_nstep) cfg.n_values.push_back(n);
      cfg.trials = st_trials;
      cfg.seed = detail::resolve_seed(st_seed);
      cfg.center = st_center;
      cfg.half_width = st_half;
      cfg.noise = NoiseSpec{st_noise, st_noise, st_round, 0};
      cfg.solver = st_solver.solver();
      const StudyReport rep = condition_study(cfg);
      detail::emit(out, st_out, io::format_study(rep));
      const bool csv_on_stdout = !st_out || *st_out == "-";
      Printer summary(csv_on_stdout ? err : out, full);
      for (const auto& [n, med] : rep.median_cond()) summary.kv("median_cond[" + std::to_string(n) + "]", med);
      if (rep.all_failed()) {
        err << "error: every trial failed (first: " << rep.rows.front().failure << ")\n";
        return kNumerical;
      }
    } else if (*fx_cmd) {
      const Fixture fx = fixture(fx_name);
      namespace fs = std::filesystem;
      std::error_code ec;
      fs::create_directories(fx_dir, ec);
      const fs::path base = fs::path(fx_dir) / fx.name;
      auto path = [&](const char* suffix) { return base.string() + suffix; };
      io::write_file(path(".csv"), io::format_dataset(fx.data));
      io::write_file(path(".model.json"), io::format_problem(&fx.model, 0.0, nullptr));
      io::write_file(path(".constraints.json"), io::format_problem(nullptr, std::nullopt, &fx.constraints));
      io::write_file(path(".problem.json"), io::format_problem(&fx.model, std::nullopt, &fx.constraints));
      nlohmann::ordered_json meta;
      meta["name"] = fx.name;
      meta["m"] = fx.data.dim();
      meta["N"] = fx.data.size();
      meta["partial"] = fx.meta.partial;
      meta["y_regenerated"] = fx.meta.y_regenerated;
      meta["reconstructed_columns"] = fx.meta.reconstructed_columns;
      meta["printed_y"] = fx.meta.printed_y;
      meta["notes"] = fx.meta.notes;
      io::write_file(path(".meta.json"), meta.dump(2) + "\n");
      for (const char* s : {".csv", ".model.json", ".constraints.json", ".problem.json", ".meta.json"})
        p.kv("wrote", path(s));
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}

}  // namespace quadinv::cli
