#ifndef SECTORIA_JSON_IO_HPP
#define SECTORIA_JSON_IO_HPP

#include <optional>
#include <string>
#include <variant>

#include <json.hpp>  // vendored nlohmann/json

#include "sectoria/boundary_ops.hpp"
#include "sectoria/elliptic_assembly.hpp"
#include "sectoria/form_core.hpp"

namespace sectoria {

using Json = nlohmann::json;

/// Complex scalars are encoded as [re, im]; a bare number is accepted as a
/// real value on input.
Complex complex_from_json(const Json& j);
Json complex_to_json(Complex z);

Mat matrix_from_json(const Json& j);
Json matrix_to_json(const Mat& m);

FormTriple form_triple_from_json(const Json& j);
Json form_triple_to_json(const FormTriple& t);

GridProblem grid_problem_from_json(const Json& j);

struct RunConfig {
  std::string task;
  std::variant<FormTriple, GridProblem> problem;
  Json params;  // validated per task
  std::string output = "out";
  std::uint64_t seed = 0;
  double tol = 0.0;  // 0 means per-task defaults

  bool has_grid() const { return std::holds_alternative<GridProblem>(problem); }
  const GridProblem& grid() const { return std::get<GridProblem>(problem); }
  const FormTriple& triple() const { return std::get<FormTriple>(problem); }
};

/// Parses and schema-validates a config document; unknown keys are
/// rejected with InvalidInput.
RunConfig run_config_from_json(const Json& j);

/// Log- or linearly-spaced grid from "A:B:logN" / "A:B:linN".
std::vector<double> parse_time_grid(const std::string& spec);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace sectoria

#endif
