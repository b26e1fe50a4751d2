#pragma once

// CSV and JSON artifacts: node sets, measures, solve reports, sweeps.
// Numbers are written with 17 significant digits so that files round-trip
// and identical runs produce identical bytes.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "riesz/analysis.hpp"
#include "riesz/errors.hpp"
#include "riesz/geometry.hpp"
#include "riesz/measures.hpp"
#include "riesz/solvers.hpp"

namespace riesz::io {

using nlohmann::json;

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string coord_header(int dim) {
  std::string h;
  for (int d = 1; d <= dim; ++d) h += "x" + std::to_string(d) + ",";
  return h;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline Table read_table(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("CSV input is empty");
  t.header = split_csv_line(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != t.header.size()) {
      throw ArgumentError("CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                          " fields, expected " + std::to_string(t.header.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != c.size() || c.empty()) {
        throw ArgumentError("CSV line " + std::to_string(lineno) + ": '" + c + "' is not a number");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Checks x1..xd,<last> and returns d.
inline int check_header(const std::vector<std::string>& header, const std::string& last) {
  if (header.size() < 3 || header.back() != last) {
    throw ArgumentError("CSV header must be x1,...,xd," + last);
  }
  const int dim = static_cast<int>(header.size()) - 1;
  for (int d = 0; d < dim; ++d) {
    if (header[static_cast<std::size_t>(d)] != "x" + std::to_string(d + 1)) {
      throw ArgumentError("CSV header column " + std::to_string(d + 1) + " must be x" + std::to_string(d + 1));
    }
  }
  return dim;
}

inline Eigen::MatrixXd coords_of(const Table& t, int dim) {
  Eigen::MatrixXd coords(dim, static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (int d = 0; d < dim; ++d) coords(d, static_cast<Eigen::Index>(r)) = t.rows[r][static_cast<std::size_t>(d)];
  }
  return coords;
}

inline Eigen::VectorXd last_column(const Table& t) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) v[static_cast<Eigen::Index>(r)] = t.rows[r].back();
  return v;
}

inline void write_rows(std::ostream& out, const NodeSet& nodes, const Eigen::VectorXd& last) {
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    for (int d = 0; d < nodes.dim(); ++d) out << format_number(nodes.coords()(d, i)) << ',';
    out << format_number(last[i]) << '\n';
  }
}

}  // namespace detail

inline void write_nodeset_csv(std::ostream& out, const NodeSet& nodes) {
  out << detail::coord_header(nodes.dim()) << "spacing\n";
  detail::write_rows(out, nodes, nodes.spacing());
}

inline NodeSet read_nodeset_csv(std::istream& in) {
  const auto t = detail::read_table(in);
  const int dim = detail::check_header(t.header, "spacing");
  if (t.rows.empty()) return NodeSet(dim);
  return NodeSet(detail::coords_of(t, dim), detail::last_column(t));
}

inline void write_measure_csv(std::ostream& out, const DiscreteMeasure& mu) {
  out << detail::coord_header(mu.dim()) << "weight\n";
  detail::write_rows(out, mu.nodes(), mu.weights());
}

/// Measure CSV carries no spacing; it is taken as the nearest-neighbor distance.
inline DiscreteMeasure read_measure_csv(std::istream& in) {
  const auto t = detail::read_table(in);
  const int dim = detail::check_header(t.header, "weight");
  if (t.rows.empty()) return DiscreteMeasure::zero(dim);
  return DiscreteMeasure(NodeSet::from_points(detail::coords_of(t, dim)), detail::last_column(t));
}

inline void write_signed_measure_csv(std::ostream& out, const SignedMeasure& omega) {
  out << detail::coord_header(omega.dim()) << "weight_signed\n";
  detail::write_rows(out, omega.plus().nodes(), omega.plus().weights());
  detail::write_rows(out, omega.minus().nodes(), -omega.minus().weights());
}

/// Accepts either a `weight_signed` column (split on sign) or a plain
/// nonnegative `weight` column.
inline SignedMeasure read_signed_measure_csv(std::istream& in) {
  const auto t = detail::read_table(in);
  if (t.header.empty()) throw ArgumentError("CSV header is empty");
  const bool is_signed = t.header.back() == "weight_signed";
  const int dim = detail::check_header(t.header, is_signed ? "weight_signed" : "weight");
  if (t.rows.empty()) return SignedMeasure::zero(dim);
  const NodeSet nodes = NodeSet::from_points(detail::coords_of(t, dim));
  const Eigen::VectorXd w = detail::last_column(t);
  if (is_signed) return SignedMeasure::from_signed(nodes, w);
  return SignedMeasure::positive(DiscreteMeasure(nodes, w));
}

/// Report JSON. `objective` is the solver's 1/2 w'Kw - b'w;
/// `objective_paper_convention` is the Gauss functional w'Kw - 2 b'w.
inline json report_to_json(const SolveReport& rep, double mass) {
  json j;
  j["objective"] = rep.internal_objective;
  j["objective_paper_convention"] = rep.objective;
  j["kkt_stationarity"] = rep.kkt_stationarity;
  j["kkt_complementarity"] = rep.kkt_complementarity;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["equilibrium_constant"] = rep.equilibrium_constant ? json(*rep.equilibrium_constant) : json(nullptr);
  j["total_mass"] = mass;
  return j;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "radius,cone_mass,cone_objective,slice_objective,equilibrium_constant,support_radius,converged\n";
  for (const auto& r : records) {
    out << format_number(r.truncation_radius) << ',' << format_number(r.cone_mass) << ','
        << format_number(r.cone_objective) << ',' << format_number(r.slice_objective) << ','
        << format_number(r.equilibrium_constant) << ',' << format_number(r.support_radius) << ','
        << (r.converged ? "true" : "false") << '\n';
  }
}

inline json classification_to_json(const SweepResult& sweep) {
  json j;
  j["verdict"] = to_string(sweep.verdict);
  j["m_infinity"] = sweep.m_infinity;
  j["margin"] = sweep.margin;
  return j;
}

}  // namespace riesz::io
