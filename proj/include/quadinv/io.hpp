#pragma once

// File formats:
//   dataset CSV  - optional '#' comment lines, header x1,...,xm,y, one observation per line
//   problem JSON - {"G": [[...]], "c": [...], "w00": 0, "A": [[...]], "b": [...]}, all keys optional
//   study CSV    - '# seed=..., generator=..., solver=...' then m,N,trial,rank,cond,recovery_error

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "quadinv/datagen.hpp"
#include "quadinv/error.hpp"
#include "quadinv/model.hpp"

namespace quadinv::io {

/// %.6g, or %.17g (round-trip exact) with full precision.
inline std::string format_number(double v, bool full_precision = false) {
  char buf[64];
  std::snprintf(buf, sizeof buf, full_precision ? "%.17g" : "%.6g", v);
  return buf;
}

inline std::string format_vector(const Vector& v, bool full_precision = false, const char* sep = " ") {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_number(v(i), full_precision);
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("error writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Dataset CSV

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

struct PointTable {
  Matrix points;
  std::optional<Vector> values;
};

/// Parses a CSV with header x1..xm and an optional trailing y column.
inline PointTable parse_point_table(std::string_view text, const std::string& source, bool require_values) {
  std::vector<std::vector<double>> rows;
  std::optional<std::size_t> cols;
  bool has_y = false;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  auto fail = [&](const std::string& msg) { throw DataError(source + ":" + std::to_string(lineno) + ": " + msg); };
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = detail::trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto cells = detail::split(line);
    if (!cols) {
      has_y = cells.back() == "y";
      const std::size_t m = cells.size() - (has_y ? 1 : 0);
      if (require_values && !has_y) fail("header must end with column 'y'");
      for (std::size_t j = 0; j < m; ++j)
        if (cells[j] != "x" + std::to_string(j + 1)) fail("expected header column 'x" + std::to_string(j + 1) + "'");
      cols = cells.size();
      continue;
    }
    if (cells.size() != *cols)
      fail("expected " + std::to_string(*cols) + " columns, found " + std::to_string(cells.size()));
    std::vector<double> row;
    for (auto cell : cells) {
      const auto v = detail::parse_double(cell);
      if (!v) fail("cannot parse '" + std::string(cell) + "' as a finite number");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (!cols) throw DataError(source + ": missing header row");
  if (rows.empty()) throw DataError(source + ": no data rows");
  const auto m = static_cast<Eigen::Index>(*cols - (has_y ? 1 : 0));
  PointTable table{Matrix(static_cast<Eigen::Index>(rows.size()), m), std::nullopt};
  if (has_y) table.values = Vector(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < m; ++j) table.points(static_cast<Eigen::Index>(i), j) = rows[i][j];
    if (has_y) (*table.values)(static_cast<Eigen::Index>(i)) = rows[i].back();
  }
  return table;
}

inline Dataset parse_dataset(std::string_view text, const std::string& source = "<dataset>") {
  PointTable t = parse_point_table(text, source, true);
  if (t.points.cols() < 1) throw DataError(source + ": dataset needs at least one x column");
  return Dataset(std::move(t.points), std::move(*t.values));
}

inline Dataset read_dataset(const std::string& path) { return parse_dataset(read_file(path), path); }

/// Full-precision CSV; parse_dataset(format_dataset(d)) reproduces d exactly.
inline std::string format_dataset(const Dataset& data) {
  std::string out = "# m=" + std::to_string(data.dim()) + " N=" + std::to_string(data.size()) + "\n";
  for (Eigen::Index j = 0; j < data.dim(); ++j) out += "x" + std::to_string(j + 1) + ",";
  out += "y\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) out += format_number(data.points()(i, j), true) + ",";
    out += format_number(data.value(i), true) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Problem / model JSON

struct ProblemDoc {
  std::optional<QuadraticModel> model;
  double w00 = 0.0;
  std::optional<ConstraintSet> constraints;
};

namespace detail {

using nlohmann::json;

inline Vector json_vector(const json& j, const std::string& key, const std::string& source) {
  if (!j.is_array()) throw DataError(source + ": '" + key + "' must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw DataError(source + ": '" + key + "' must contain only numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Matrix json_matrix(const json& j, const std::string& key, const std::string& source,
                          std::optional<Eigen::Index> cols_if_empty = std::nullopt) {
  if (!j.is_array()) throw DataError(source + ": '" + key + "' must be an array of row arrays");
  if (j.empty()) return Matrix(0, cols_if_empty.value_or(0));
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = json_vector(j[static_cast<std::size_t>(r)], key, source);
    if (cols < 0) {
      cols = row.size();
      m.resize(rows, cols);
    } else if (row.size() != cols) {
      throw DataError(source + ": '" + key + "' rows have inconsistent lengths");
    }
    m.row(r) = row.transpose();
  }
  return m;
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace detail

inline ProblemDoc parse_problem(std::string_view text, const std::string& source = "<problem>") {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(source + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError(source + ": top level must be a JSON object");
  ProblemDoc doc;
  try {
    const bool has_g = j.contains("G");
    const bool has_c = j.contains("c");
    if (has_g != has_c) throw DataError(source + ": model requires both 'G' and 'c'");
    if (has_g) doc.model = QuadraticModel(detail::json_matrix(j["G"], "G", source), detail::json_vector(j["c"], "c", source));
    if (j.contains("w00")) {
      if (!j["w00"].is_number()) throw DataError(source + ": 'w00' must be a number");
      doc.w00 = j["w00"].get<double>();
    }
    const bool has_a = j.contains("A");
    const bool has_b = j.contains("b");
    if (has_a != has_b) throw DataError(source + ": constraints require both 'A' and 'b'");
    if (has_a) {
      std::optional<Eigen::Index> m;
      if (doc.model) m = doc.model->dim();
      Matrix a = detail::json_matrix(j["A"], "A", source, m);
      Vector b = detail::json_vector(j["b"], "b", source);
      if (doc.model && a.cols() != doc.model->dim())
        throw DataError(source + ": 'A' has " + std::to_string(a.cols()) + " columns, model dimension is " +
                        std::to_string(doc.model->dim()));
      doc.constraints = ConstraintSet(std::move(a), std::move(b));
    }
  } catch (const UsageError& e) {
    throw DataError(source + ": " + e.what());
  }
  return doc;
}

inline ProblemDoc read_problem(const std::string& path) { return parse_problem(read_file(path), path); }

inline std::string format_problem(const QuadraticModel* model, std::optional<double> w00, const ConstraintSet* cons) {
  nlohmann::ordered_json j;
  if (model) {
    j["G"] = detail::to_json(model->G());
    j["c"] = detail::to_json(model->c());
  }
  if (w00) j["w00"] = *w00;
  if (cons) {
    j["A"] = detail::to_json(cons->A());
    j["b"] = detail::to_json(cons->b());
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Study CSV

inline constexpr std::string_view kStudyHeader = "m,N,trial,rank,cond,recovery_error";

inline std::string format_study(const StudyReport& rep) {
  std::string out = "# seed=" + std::to_string(rep.seed) + ", generator=" + rep.generator + ", solver=" + rep.solver + "\n";
  out += std::string(kStudyHeader) + "\n";
  for (const auto& r : rep.rows) {
    out += std::to_string(r.m) + "," + std::to_string(r.n) + "," + std::to_string(r.trial) + ",";
    if (r.failed)
      out += "nan,nan,nan\n";
    else
      out += std::to_string(r.rank) + "," + format_number(r.cond, true) + "," + format_number(r.recovery_error, true) + "\n";
  }
  return out;
}

}  // namespace quadinv::io
