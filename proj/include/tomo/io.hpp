#pragma once

// File formats: operator JSON, symbol CSV, spin tomogram CSV, symplectic
// tomogram CSV (SAMPLED) / JSON (SPECTRAL) and kernel JSON dumps.
// CSV numbers are printed with 17 significant digits; JSON numbers use the
// shortest representation that parses back to the same double.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tomo/error.hpp"
#include "tomo/operator.hpp"
#include "tomo/scheme.hpp"
#include "tomo/spin.hpp"
#include "tomo/symplectic.hpp"

namespace tomo::io {

using nlohmann::json;

/// Unreadable, unwritable or malformed files.
class IoError : public Error {
 public:
  using Error::Error;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError("malformed JSON in " + origin + ": " + e.what());
  }
}

// --- operators ---------------------------------------------------------------

inline json operator_to_json(const OperatorMatrix& a) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json re_row = json::array();
    json im_row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      re_row.push_back(a(r, c).real());
      im_row.push_back(a(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return {{"dim", a.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

/// Parses {"dim": n, "re": [[...]], "im": [[...]]}; "im" may be omitted.
inline OperatorMatrix operator_from_json(const json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    if (dim < 1) throw IoError("operator JSON: dim must be positive");
    const json& re = j.at("re");
    const bool has_im = j.contains("im");
    OperatorMatrix a(dim, dim);
    auto check_rows = [dim](const json& m, const char* key) {
      if (!m.is_array() || static_cast<int>(m.size()) != dim) {
        throw IoError(std::string("operator JSON: '") + key + "' must have " + std::to_string(dim) + " rows");
      }
      for (const auto& row : m)
        if (!row.is_array() || static_cast<int>(row.size()) != dim) {
          throw IoError(std::string("operator JSON: every row of '") + key + "' needs " + std::to_string(dim) + " entries");
        }
    };
    check_rows(re, "re");
    if (has_im) check_rows(j.at("im"), "im");
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        const double x = re[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
        const double y = has_im ? j.at("im")[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>() : 0.0;
        a(r, c) = complex(x, y);
      }
    return a;
  } catch (const json::exception& e) {
    throw IoError(std::string("operator JSON: ") + e.what());
  }
}

inline OperatorMatrix read_operator(const std::string& path) {
  return operator_from_json(parse_json(read_file(path), "'" + path + "'"));
}

inline void write_operator(const std::string& path, const OperatorMatrix& a) {
  write_file(path, operator_to_json(a).dump(1) + "\n");
}

// --- symbols -----------------------------------------------------------------

/// `index, label-components..., re, im` with a header row.
inline std::string symbol_csv(const Symbol& f, const Scheme& s) {
  require_symbol_of(f, s, "symbol_csv");
  std::string out = "index";
  for (const auto& name : s.label_names()) out += "," + name;
  out += ",re,im\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += std::to_string(s.point(i).index);
    for (double c : s.point(i).label) out += "," + format_double(c);
    out += "," + format_double(f[i].real()) + "," + format_double(f[i].imag()) + "\n";
  }
  return out;
}

namespace detail {

inline std::vector<std::vector<double>> parse_numeric_csv(const std::string& text, std::size_t columns,
                                                          const std::string& expected_header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) throw IoError("CSV: expected header '" + expected_header + "', got '" + line + "'");
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw IoError("CSV line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
      }
    }
    if (row.size() != columns) {
      throw IoError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline Symbol symbol_from_csv(const std::string& text, const Scheme& s) {
  std::string header = "index";
  for (const auto& name : s.label_names()) header += "," + name;
  header += ",re,im";
  const auto rows = detail::parse_numeric_csv(text, s.label_names().size() + 3, header);
  if (rows.size() != s.size()) {
    throw SchemeMismatch("symbol CSV has " + std::to_string(rows.size()) + " rows, scheme has " +
                         std::to_string(s.size()) + " points");
  }
  Eigen::VectorXcd values(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<std::size_t>(rows[i][0]) != i) throw SchemeMismatch("symbol CSV: rows out of index order");
    values(static_cast<Eigen::Index>(i)) = complex(rows[i][rows[i].size() - 2], rows[i].back());
  }
  return {s.id(), std::move(values)};
}

// --- spin tomograms ----------------------------------------------------------

inline constexpr const char* kSpinTomogramHeader = "m1_twice,alpha,beta,value";

/// `m1_twice, alpha, beta, value`; only real tomograms can be written.
inline std::string spin_tomogram_csv(const SpinTomogram& w, double imag_tolerance = 1e-12) {
  if (w.max_imag() > imag_tolerance) {
    throw DomainError("spin tomogram CSV holds real values only; the operator is not Hermitian (max imaginary part " +
                      std::to_string(w.max_imag()) + ")");
  }
  const auto ms = projections(w.j());
  std::string out = std::string(kSpinTomogramHeader) + "\n";
  const auto& g = w.grid();
  for (int k = 0; k < w.dim(); ++k)
    for (int ia = 0; ia < g.n_alpha(); ++ia)
      for (int ib = 0; ib < g.n_beta(); ++ib) {
        out += std::to_string(ms[static_cast<std::size_t>(k)].twice()) + "," + format_double(g.alpha(ia)) + "," +
               format_double(g.beta(ib)) + "," + format_double(w.value(k, ia, ib).real()) + "\n";
      }
  return out;
}

/// Reads a tomogram written by spin_tomogram_csv on the same grid. Throws
/// SchemeMismatch when the rows do not line up with the grid.
inline SpinTomogram spin_tomogram_from_csv(const std::string& text, const AngularGrid& grid) {
  const auto rows = detail::parse_numeric_csv(text, 4, kSpinTomogramHeader);
  const SpinTomogram layout(grid, std::vector<complex>(static_cast<std::size_t>(grid.j().twice() + 1) * grid.angle_count()));
  if (rows.size() != layout.point_count()) {
    throw SchemeMismatch("tomogram CSV has " + std::to_string(rows.size()) + " rows; the grid for j=" + grid.j().str() +
                         " with n_alpha=" + std::to_string(grid.n_alpha()) + ", n_beta=" + std::to_string(grid.n_beta()) +
                         " has " + std::to_string(layout.point_count()) + " points");
  }
  const auto ms = projections(grid.j());
  std::vector<complex> values(rows.size());
  std::size_t r = 0;
  for (int k = 0; k < layout.dim(); ++k)
    for (int ia = 0; ia < grid.n_alpha(); ++ia)
      for (int ib = 0; ib < grid.n_beta(); ++ib, ++r) {
        const auto& row = rows[r];
        if (static_cast<int>(std::lround(row[0])) != ms[static_cast<std::size_t>(k)].twice() ||
            std::abs(row[1] - grid.alpha(ia)) > 1e-9 || std::abs(row[2] - grid.beta(ib)) > 1e-9) {
          throw SchemeMismatch("tomogram CSV row " + std::to_string(r + 2) + " does not match the grid node");
        }
        values[layout.index(k, ia, ib)] = row[3];
      }
  return {grid, std::move(values)};
}

// --- symplectic tomograms ----------------------------------------------------

inline constexpr const char* kSampledHeader = "theta,X,value,smoothing";

inline std::string sampled_tomogram_csv(const SymplecticTomogram& t) {
  if (t.representation != TomogramRepresentation::sampled) throw DomainError("sampled_tomogram_csv: not a SAMPLED tomogram");
  std::string out = std::string(kSampledHeader) + "\n";
  for (std::size_t i = 0; i < t.thetas.size(); ++i)
    for (std::size_t k = 0; k < t.xs.size(); ++k)
      out += format_double(t.thetas[i]) + "," + format_double(t.xs[k]) + "," +
             format_double(t.values[i](static_cast<Eigen::Index>(k))) + "," + format_double(t.smoothing) + "\n";
  return out;
}

inline SymplecticTomogram sampled_tomogram_from_csv(const std::string& text) {
  const auto rows = detail::parse_numeric_csv(text, 4, kSampledHeader);
  if (rows.empty()) throw IoError("sampled tomogram CSV: no rows");
  SymplecticTomogram t;
  t.representation = TomogramRepresentation::sampled;
  t.smoothing = rows.front()[3];
  std::vector<double> current;
  for (const auto& row : rows) {
    if (row[3] != t.smoothing) throw IoError("sampled tomogram CSV: smoothing must be the same on every row");
    if (t.thetas.empty() || row[0] != t.thetas.back()) {
      if (!t.thetas.empty()) {
        t.values.push_back(Eigen::Map<Eigen::VectorXd>(current.data(), static_cast<Eigen::Index>(current.size())));
        current.clear();
      }
      t.thetas.push_back(row[0]);
    }
    if (t.thetas.size() == 1) t.xs.push_back(row[1]);
    current.push_back(row[2]);
  }
  t.values.push_back(Eigen::Map<Eigen::VectorXd>(current.data(), static_cast<Eigen::Index>(current.size())));
  for (const auto& v : t.values)
    if (static_cast<std::size_t>(v.size()) != t.xs.size()) throw IoError("sampled tomogram CSV: ragged X grid");
  return t;
}

inline json spectral_tomogram_to_json(const SymplecticTomogram& t, int n_trunc) {
  if (t.representation != TomogramRepresentation::spectral) throw DomainError("spectral JSON: not a SPECTRAL tomogram");
  json slices = json::array();
  for (std::size_t i = 0; i < t.thetas.size(); ++i) {
    json eig = json::array();
    json mre = json::array();
    json mim = json::array();
    for (Eigen::Index e = 0; e < t.eigenvalues[i].size(); ++e) {
      eig.push_back(t.eigenvalues[i](e));
      mre.push_back(t.masses[i](e).real());
      mim.push_back(t.masses[i](e).imag());
    }
    slices.push_back({{"theta", t.thetas[i]}, {"eigenvalues", eig}, {"masses_re", mre}, {"masses_im", mim}});
  }
  return {{"representation", "spectral"}, {"n_trunc", n_trunc}, {"slices", slices}};
}

inline SymplecticTomogram spectral_tomogram_from_json(const json& j, int* n_trunc = nullptr) {
  try {
    if (j.at("representation").get<std::string>() != "spectral") throw IoError("spectral JSON: wrong representation tag");
    SymplecticTomogram t;
    t.representation = TomogramRepresentation::spectral;
    if (n_trunc) *n_trunc = j.at("n_trunc").get<int>();
    for (const auto& s : j.at("slices")) {
      t.thetas.push_back(s.at("theta").get<double>());
      const auto eig = s.at("eigenvalues").get<std::vector<double>>();
      const auto mre = s.at("masses_re").get<std::vector<double>>();
      const auto mim = s.at("masses_im").get<std::vector<double>>();
      if (eig.size() != mre.size() || eig.size() != mim.size()) throw IoError("spectral JSON: ragged slice");
      Eigen::VectorXd ev(static_cast<Eigen::Index>(eig.size()));
      Eigen::VectorXcd ms(static_cast<Eigen::Index>(eig.size()));
      for (std::size_t e = 0; e < eig.size(); ++e) {
        ev(static_cast<Eigen::Index>(e)) = eig[e];
        ms(static_cast<Eigen::Index>(e)) = complex(mre[e], mim[e]);
      }
      t.eigenvalues.push_back(std::move(ev));
      t.masses.push_back(std::move(ms));
    }
    if (t.thetas.empty()) throw IoError("spectral JSON: no slices");
    return t;
  } catch (const json::exception& e) {
    throw IoError(std::string("spectral JSON: ") + e.what());
  }
}

// --- kernels -----------------------------------------------------------------

/// Dense kernels store flat "re"/"im" arrays in (a, b, c) row-major order;
/// sparse kernels list [a, b, c, re, im] for every stored entry.
inline json kernel_to_json(const KernelTensor& k) {
  json out = {{"points", k.points()}};
  if (k.is_sparse()) {
    out["mode"] = "sparse";
    out["threshold"] = k.threshold();
    json entries = json::array();
    for (const auto& e : k.entries()) entries.push_back({e.a, e.b, e.c, e.value.real(), e.value.imag()});
    out["entries"] = std::move(entries);
  } else {
    out["mode"] = "dense";
    json re = json::array();
    json im = json::array();
    for (const auto& v : k.dense()) {
      re.push_back(v.real());
      im.push_back(v.imag());
    }
    out["re"] = std::move(re);
    out["im"] = std::move(im);
  }
  return out;
}

inline KernelTensor kernel_from_json(const json& j, const Scheme& s) {
  try {
    const auto points = j.at("points").get<std::size_t>();
    if (points != s.size()) throw SchemeMismatch("kernel JSON: point count does not match the scheme");
    if (j.at("mode").get<std::string>() == "sparse") {
      std::vector<KernelTensor::Entry> entries;
      for (const auto& e : j.at("entries")) {
        entries.push_back({e.at(0).get<std::int32_t>(), e.at(1).get<std::int32_t>(), e.at(2).get<std::int32_t>(),
                           complex(e.at(3).get<double>(), e.at(4).get<double>())});
      }
      return KernelTensor::from_entries(s.id(), points, j.at("threshold").get<double>(), std::move(entries));
    }
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size()) throw IoError("kernel JSON: re/im length mismatch");
    std::vector<complex> dense(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) dense[i] = complex(re[i], im[i]);
    return {s.id(), points, std::move(dense)};
  } catch (const json::exception& e) {
    throw IoError(std::string("kernel JSON: ") + e.what());
  }
}

}  // namespace tomo::io
