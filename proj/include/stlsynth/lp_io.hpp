#pragma once

#include "stlsynth/model.hpp"
#include "stlsynth/numfmt.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stlsynth {

namespace detail {

/// Appends " + c v" / " - c v" term chains starting from `first`.
inline void append_term(std::string& out, bool& first, double coeff, const std::string& name) {
  if (coeff == 0.0) return;
  if (first) {
    out += coeff < 0 ? "-" : "";
    out += format_double(std::abs(coeff)) + " " + name;
    first = false;
  } else {
    out += coeff < 0 ? " - " : " + ";
    out += format_double(std::abs(coeff)) + " " + name;
  }
}

}  // namespace detail

/// Renders the model in CPLEX LP text format. Output is a pure function of
/// the model: the same model always produces byte-identical text.
inline std::string to_lp_string(const MilpModel& model) {
  std::string out;
  out += "\\ stl-synth model: " + std::to_string(model.var_count()) + " variables, " +
         std::to_string(model.constraint_count()) + " constraints\n";
  out += "Minimize\n obj: ";
  bool first = true;
  for (int j = 0; j < model.var_count(); ++j)
    detail::append_term(out, first, model.objective_linear()[j], model.variable(j).name);
  if (model.has_quadratic_objective()) {
    out += first ? "[ " : " + [ ";
    bool qfirst = true;
    for (int j = 0; j < model.var_count(); ++j) {
      const double q = model.objective_quadratic_diag()[j];
      if (q == 0.0) continue;
      if (!qfirst) out += q < 0 ? " - " : " + ";
      else if (q < 0) out += "-";
      out += format_double(std::abs(2.0 * q)) + " " + model.variable(j).name + " ^ 2";
      qfirst = false;
    }
    out += " ] / 2";
  }
  out += "\nSubject To\n";
  for (const auto& row : model.rows()) {
    out += " " + row.name + ": ";
    bool rfirst = true;
    for (const auto& [var, coeff] : row.terms)
      detail::append_term(out, rfirst, coeff, model.variable(var).name);
    if (rfirst) out += "0 " + model.variable(0).name;
    out += row.sense == RowSense::Equal ? " = " : " <= ";
    out += format_double(row.rhs) + "\n";
  }
  out += "Bounds\n";
  for (const auto& var : model.variables()) {
    if (var.type == VarType::Binary) continue;  // implied by the Binaries section
    const bool lo = std::isfinite(var.lower), hi = std::isfinite(var.upper);
    if (lo && hi && var.lower == var.upper) {
      out += " " + var.name + " = " + format_double(var.lower) + "\n";
    } else if (lo && hi) {
      out += " " + format_double(var.lower) + " <= " + var.name + " <= " +
             format_double(var.upper) + "\n";
    } else if (lo) {
      out += " " + var.name + " >= " + format_double(var.lower) + "\n";
    } else if (hi) {
      out += " " + var.name + " <= " + format_double(var.upper) + "\n";
    } else {
      out += " " + var.name + " free\n";
    }
  }
  if (model.binary_count() > 0) {
    out += "Binaries\n";
    for (const auto& var : model.variables())
      if (var.type == VarType::Binary) out += " " + var.name + "\n";
  }
  out += "End\n";
  return out;
}

inline void export_lp(const MilpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_lp: cannot open '" + path + "'");
  out << to_lp_string(model);
  if (!out) throw std::runtime_error("export_lp: write to '" + path + "' failed");
}

/// Solution text: '#' comments plus one "name value" pair per line.
inline std::string to_solution_string(const MilpModel& model,
                                      const std::vector<double>& primal,
                                      double objective) {
  if (static_cast<int>(primal.size()) != model.var_count())
    throw std::invalid_argument("to_solution_string: primal size mismatch");
  std::string out = "# objective " + format_double(objective) + "\n";
  for (int j = 0; j < model.var_count(); ++j)
    out += model.variable(j).name + " " + format_double(primal[j]) + "\n";
  return out;
}

inline void write_solution(const MilpModel& model, const std::vector<double>& primal,
                           double objective, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_solution: cannot open '" + path + "'");
  out << to_solution_string(model, primal, objective);
  if (!out) throw std::runtime_error("write_solution: write to '" + path + "' failed");
}

/// Reads a "name value" solution file back into model variable order.
/// Unknown names and missing variables are hard errors.
inline std::vector<double> read_solution(const MilpModel& model, std::istream& in) {
  std::map<std::string, int> ids;
  for (int j = 0; j < model.var_count(); ++j) ids[model.variable(j).name] = j;
  std::vector<double> primal(model.var_count(), 0.0);
  std::vector<bool> seen(model.var_count(), false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    double value = 0.0;
    if (!(fields >> value))
      throw std::runtime_error("solution line " + std::to_string(lineno) +
                               ": missing value for '" + name + "'");
    auto it = ids.find(name);
    if (it == ids.end())
      throw std::runtime_error("solution line " + std::to_string(lineno) +
                               ": unknown variable '" + name + "'");
    primal[it->second] = value;
    seen[it->second] = true;
  }
  for (int j = 0; j < model.var_count(); ++j)
    if (!seen[j])
      throw std::runtime_error("solution file is missing variable '" +
                               model.variable(j).name + "'");
  return primal;
}

inline std::vector<double> read_solution_file(const MilpModel& model,
                                              const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_solution: cannot open '" + path + "'");
  return read_solution(model, in);
}

}  // namespace stlsynth
