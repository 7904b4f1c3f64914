#include "sectoria/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace sectoria {

namespace {

void require_keys(const Json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw InvalidInput("unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw InvalidInput("complex values must be numbers or [re, im] pairs");
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Mat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw InvalidInput("matrix must be a non-empty nested array");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Mat m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Index>(j[r].size()) != cols)
      throw InvalidInput("matrix rows must have equal length");
    for (Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

namespace {

HilbertSpaceSpec space_from_json(const Json& j, const std::string& where) {
  require_keys(j, {"dim", "gram"}, where);
  if (!j.contains("dim")) throw InvalidInput(where + " needs a dim");
  HilbertSpaceSpec s;
  s.dim = j.at("dim").get<Index>();
  if (j.contains("gram")) s.gram = matrix_from_json(j.at("gram"));
  s.validate();
  return s;
}

}  // namespace

FormTriple form_triple_from_json(const Json& j) {
  require_keys(j, {"type", "V", "H", "form", "jmap"}, "problem");
  FormTriple t;
  if (!j.contains("form") || !j.contains("jmap"))
    throw InvalidInput("form_triple needs 'form' and 'jmap'");
  t.form = matrix_from_json(j.at("form"));
  t.jmap = matrix_from_json(j.at("jmap"));
  t.V = j.contains("V") ? space_from_json(j.at("V"), "V")
                        : HilbertSpaceSpec::euclidean(t.form.cols());
  t.H = j.contains("H") ? space_from_json(j.at("H"), "H")
                        : HilbertSpaceSpec::euclidean(t.jmap.rows());
  t.validate();
  return t;
}

Json form_triple_to_json(const FormTriple& t) {
  Json j;
  j["type"] = "form_triple";
  j["V"] = {{"dim", t.V.dim}};
  if (t.V.gram.size()) j["V"]["gram"] = matrix_to_json(t.V.gram);
  j["H"] = {{"dim", t.H.dim}};
  if (t.H.gram.size()) j["H"]["gram"] = matrix_to_json(t.H.gram);
  j["form"] = matrix_to_json(t.form);
  j["jmap"] = matrix_to_json(t.jmap);
  return j;
}

namespace {

std::vector<Mat> coefficients_from_json(const Json& j, int dim, int n_cells,
                                        const GridProblem& p) {
  std::vector<Mat> out;
  auto scalar_cell = [dim](Complex c) {
    Mat m = Mat::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) m(k, k) = c;
    return m;
  };
  if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number() &&
                        !j[1].is_array())) {
    out.assign(n_cells, scalar_cell(complex_from_json(j)));
    return out;
  }
  if (j.is_object()) {
    // named regions: left/right split at the x midpoint
    require_keys(j, {"left", "right"}, "coefficients");
    if (!j.contains("left") || !j.contains("right"))
      throw InvalidInput("region coefficients need 'left' and 'right'");
    const Complex cl = complex_from_json(j.at("left"));
    const Complex cr = complex_from_json(j.at("right"));
    out.reserve(n_cells);
    const int nx = p.cells[0];
    for (int c = 0; c < n_cells; ++c) {
      const int ci = dim == 1 ? c : c % nx;
      const double x_mid = (ci + 0.5) * p.lengths[0] / nx;
      out.push_back(scalar_cell(x_mid < p.lengths[0] / 2 ? cl : cr));
    }
    return out;
  }
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != n_cells)
      throw InvalidInput("per-cell coefficients need one entry per cell");
    for (const auto& cell : j) {
      if (cell.is_array() && cell.size() == 2 && cell[0].is_number())
        out.push_back(scalar_cell(complex_from_json(cell)));
      else
        out.push_back(matrix_from_json(cell));
    }
    return out;
  }
  throw InvalidInput("unrecognized coefficients encoding");
}

BoundaryCondition bc_from_json(const Json& j) {
  require_keys(j, {"kind", "beta", "alpha", "B"}, "bc");
  if (!j.contains("kind")) throw InvalidInput("bc needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dirichlet") return BoundaryCondition::dirichlet();
  if (kind == "neumann") return BoundaryCondition::neumann();
  if (kind == "robin") {
    if (!j.contains("beta")) throw InvalidInput("robin bc needs beta");
    RVec beta(j.at("beta").size());
    for (Index i = 0; i < beta.size(); ++i)
      beta(i) = j.at("beta")[i].get<double>();
    return BoundaryCondition::robin(beta);
  }
  if (kind == "wentzell") {
    if (!j.contains("alpha") || !j.contains("B"))
      throw InvalidInput("wentzell bc needs alpha and B");
    Vec alpha(j.at("alpha").size());
    for (Index i = 0; i < alpha.size(); ++i)
      alpha(i) = complex_from_json(j.at("alpha")[i]);
    return BoundaryCondition::wentzell(alpha, matrix_from_json(j.at("B")));
  }
  throw InvalidInput("unknown bc kind '" + kind + "'");
}

}  // namespace

GridProblem grid_problem_from_json(const Json& j) {
  require_keys(j,
               {"type", "dim", "lengths", "cells", "coefficients", "bc",
                "weight"},
               "problem");
  GridProblem p;
  p.dim = j.value("dim", 1);
  if (j.contains("lengths")) {
    const auto& l = j.at("lengths");
    p.lengths[0] = l[0].get<double>();
    if (l.size() > 1) p.lengths[1] = l[1].get<double>();
  }
  if (!j.contains("cells")) throw InvalidInput("grid needs cells");
  {
    const auto& c = j.at("cells");
    p.cells[0] = c[0].get<int>();
    if (c.size() > 1) p.cells[1] = c[1].get<int>();
  }
  if (!j.contains("coefficients"))
    throw InvalidInput("grid needs coefficients");
  p.coefficients =
      coefficients_from_json(j.at("coefficients"), p.dim, p.n_cells(), p);
  if (j.contains("bc")) p.bc = bc_from_json(j.at("bc"));
  if (j.contains("weight")) {
    RVec w(j.at("weight").size());
    for (Index i = 0; i < w.size(); ++i) w(i) = j.at("weight")[i].get<double>();
    p.weight = w;
  }
  p.validate();
  return p;
}

RunConfig run_config_from_json(const Json& j) {
  require_keys(j, {"task", "problem", "params", "output", "seed", "tol"},
               "config");
  RunConfig cfg;
  if (!j.contains("task")) throw InvalidInput("config needs a task");
  cfg.task = j.at("task").get<std::string>();
  static const std::set<std::string> tasks = {
      "analyze",    "extract", "evolve",   "regularize",    "invariance",
      "gaffney",    "dtn",     "wentzell", "multiplicative"};
  if (!tasks.count(cfg.task))
    throw InvalidInput("unknown task '" + cfg.task + "'");

  if (!j.contains("problem")) throw InvalidInput("config needs a problem");
  const Json& prob = j.at("problem");
  const std::string type =
      prob.is_object() ? prob.value("type", "form_triple") : "";
  if (type == "grid")
    cfg.problem = grid_problem_from_json(prob);
  else if (type == "form_triple")
    cfg.problem = form_triple_from_json(prob);
  else
    throw InvalidInput("problem type must be 'form_triple' or 'grid'");

  cfg.params = j.value("params", Json::object());
  static const std::set<std::string> param_keys = {
      "lambda",  "t_grid", "n_max",  "samples", "seed",   "mode",
      "weight",  "slack",  "omega1", "omega2",  "radius", "initial"};
  require_keys(cfg.params, param_keys, "params");
  cfg.output = j.value("output", std::string("out"));
  cfg.seed = j.value("seed", std::uint64_t(0));
  if (cfg.params.contains("seed"))
    cfg.seed = cfg.params.at("seed").get<std::uint64_t>();
  cfg.tol = j.value("tol", 0.0);
  return cfg;
}

std::vector<double> parse_time_grid(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = spec.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw InvalidInput("time grid spec must be A:B:logN or A:B:linN");
  const double a = std::stod(spec.substr(0, c1));
  const double b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  const std::string tail = spec.substr(c2 + 1);
  bool log_spaced = false;
  std::string n_str;
  if (tail.rfind("log", 0) == 0) {
    log_spaced = true;
    n_str = tail.substr(3);
  } else if (tail.rfind("lin", 0) == 0) {
    n_str = tail.substr(3);
  } else {
    throw InvalidInput("time grid count must start with log or lin");
  }
  const int n = std::stoi(n_str);
  if (n < 1) throw InvalidInput("time grid needs at least one point");
  if (log_spaced && (a <= 0 || b <= 0))
    throw InvalidInput("log grids need positive endpoints");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const double s = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    out.push_back(log_spaced ? a * std::pow(b / a, s) : a + (b - a) * s);
  }
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sectoria
