// sectoria: config-driven driver for the form-method library.
//
// Exit codes: 0 success, 1 internal error, 2 schema violation,
// 3 mathematical refusal (witness serialized to refusal.json).

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "sectoria/csv.hpp"
#include "sectoria/evolution.hpp"
#include "sectoria/invariance.hpp"
#include "sectoria/json_io.hpp"
#include "sectoria/regularization.hpp"
#include "sectoria/version.hpp"

namespace fs = std::filesystem;
using namespace sectoria;

namespace {

struct CliOverrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<double> lambda;
  std::optional<std::string> t_spec;
  std::optional<int> n_max;
  std::optional<int> samples;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read config file " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

std::string matrix_csv(const Mat& m) {
  std::ostringstream out;
  out << "i,j,re,im\n";
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      out << i << ',' << j << ',' << csv::number(m(i, j).real()) << ','
          << csv::number(m(i, j).imag()) << '\n';
  return out.str();
}

std::vector<double> params_time_grid(const Json& params,
                                     const std::vector<double>& fallback) {
  if (!params.contains("t_grid")) return fallback;
  const Json& tg = params.at("t_grid");
  if (tg.is_string()) return parse_time_grid(tg.get<std::string>());
  std::vector<double> out;
  for (const auto& v : tg) out.push_back(v.get<double>());
  return out;
}

Vec initial_state(const Json& params, const AssembledForm& af) {
  const Index n = af.triple.H.dim;
  if (params.contains("initial") && params.at("initial").is_array()) {
    const auto& arr = params.at("initial");
    if (static_cast<Index>(arr.size()) != n)
      throw InvalidInput("initial state has wrong dimension");
    Vec x(n);
    for (Index i = 0; i < n; ++i) x(i) = complex_from_json(arr[i]);
    return x;
  }
  const std::string kind =
      params.contains("initial") ? params.at("initial").get<std::string>()
                                 : "bump";
  if (kind == "ones") return Vec::Ones(n);
  if (kind == "bump") {
    // discrete Gaussian bump centred in the domain
    Vec x(n);
    const RMat& c = af.coordinates;
    RVec centre = RVec::Zero(c.cols());
    for (Index i = 0; i < c.cols(); ++i)
      centre(i) = (c.col(i).minCoeff() + c.col(i).maxCoeff()) / 2;
    for (Index i = 0; i < n; ++i) {
      const double r = (c.row(i).transpose() - centre).norm();
      x(i) = std::exp(-50.0 * r * r);
    }
    return x;
  }
  throw InvalidInput("initial must be 'bump', 'ones' or an array");
}

std::vector<int> nodes_in_range(const AssembledForm& af, double lo, double hi) {
  std::vector<int> out;
  for (Index i = 0; i < af.coordinates.rows(); ++i)
    if (af.coordinates(i, 0) >= lo && af.coordinates(i, 0) <= hi)
      out.push_back(static_cast<int>(i));
  return out;
}

Json certificate_json(const SectorCertificate& cert) {
  Json j;
  j["vertex"] = cert.vertex;
  j["semi_angle"] = cert.semi_angle;
  j["tan_theta"] = cert.tan_theta;
  if (cert.omega) j["omega"] = *cert.omega;
  if (cert.mu) j["mu"] = *cert.mu;
  return j;
}

int run_task(const RunConfig& cfg, const std::string& config_bytes) {
  const auto t_start = std::chrono::steady_clock::now();
  fs::create_directories(cfg.output);

  Json manifest;
  manifest["config_hash"] = fnv1a_hex(config_bytes);
  manifest["task"] = cfg.task;
  manifest["seed"] = cfg.seed;
  manifest["library_version"] = version_string;
  manifest["tolerances"] = {{"rank_tol", rank_tol},
                            {"operator_equality", 1e-10},
                            {"gaffney_slack", cfg.tol > 0 ? cfg.tol : 1.25}};
  Json outputs = Json::array();
  auto emit = [&](const std::string& name, const std::string& body) {
    write_file(fs::path(cfg.output) / name, body);
    outputs.push_back(name);
  };

  const Json& params = cfg.params;
  if (cfg.task == "analyze") {
    const FormTriple& t = cfg.has_grid()
                              ? assemble_form(cfg.grid()).triple
                              : cfg.triple();
    const SectorCertificate cert = certify(t);
    const DecompositionBundle dec = kernel_and_Va(t);
    Json j = certificate_json(cert);
    j["direct_sum"] = dec.direct_sum;
    j["dim_ker_j"] = dec.ker_basis.cols();
    j["dim_Va"] = dec.va_basis.cols();
    emit("certificate.json", j.dump(2) + "\n");
    std::cout << "gamma=" << csv::number(cert.vertex)
              << " tan_theta=" << csv::number(cert.tan_theta)
              << " theta=" << csv::number(cert.semi_angle);
    if (cert.elliptic())
      std::cout << " omega=" << csv::number(*cert.omega)
                << " mu=" << csv::number(*cert.mu);
    std::cout << "\n";
  } else if (cfg.task == "extract") {
    const FormTriple& t = cfg.has_grid()
                              ? assemble_form(cfg.grid()).triple
                              : cfg.triple();
    const OperatorBundle op = extract_operator(t);
    emit("operator.csv", matrix_csv(op.A));
    Json j = certificate_json(op.cert);
    j["lambda_ref"] = op.lambda_ref;
    emit("certificate.json", j.dump(2) + "\n");
  } else if (cfg.task == "evolve") {
    if (!cfg.has_grid()) {
      const OperatorBundle op = extract_operator(cfg.triple());
      const auto t_grid = params_time_grid(params, {0.01, 0.1, 1.0});
      Vec x0 = Vec::Ones(op.A.rows());
      TrajectoryTable table =
          trajectory(op.A, x0, t_grid, {sup_norm_functional()});
      emit("trajectory.csv", table.to_csv());
    } else {
      AssembledForm af = assemble_form(cfg.grid());
      const Mat A =
          af.lumped_mass.cwiseInverse().cast<Complex>().asDiagonal() *
          af.stiffness;
      const auto t_grid = params_time_grid(params, {0.01, 0.1, 1.0});
      const Vec x0 = initial_state(params, af);
      TrajectoryTable table = trajectory(
          A, x0, t_grid, {mass_functional(af.lumped_mass), sup_norm_functional()});
      emit("trajectory.csv", table.to_csv());
    }
  } else if (cfg.task == "regularize") {
    if (!cfg.has_grid())
      throw InvalidInput("regularize expects a grid problem");
    AssembledForm af = assemble_form(cfg.grid());
    // regularizer: full-strength Dirichlet energy on the same grid
    GridProblem full = cfg.grid();
    for (auto& c : full.coefficients) c = Mat::Identity(full.dim, full.dim);
    AssembledForm bf = assemble_form(full);
    const Mat b = bf.stiffness / regularizer_scale(bf.stiffness,
                                                   af.triple.H.gram_matrix());
    const double lambda = params.value("lambda", 1.0);
    const int n_max = params.value("n_max", 1024);
    const Vec f = initial_state(params, af);
    ConvergenceReport rep =
        convergence_sweep(af.triple, b, lambda, f, dyadic_n(n_max));
    emit("convergence.csv", rep.to_csv());
  } else if (cfg.task == "invariance") {
    if (!cfg.has_grid())
      throw InvalidInput("invariance expects a grid problem");
    AssembledForm af = assemble_form(cfg.grid());
    const Mat A = af.lumped_mass.cwiseInverse().cast<Complex>().asDiagonal() *
                  af.stiffness;
    const auto t_grid = params_time_grid(params, {0.01, 0.1, 1.0});
    const int samples = params.value("samples", 200);
    std::ostringstream csv_body;
    csv_body << "check,worst_margin,pass\n";
    const std::vector<ConvexSetDescriptor> sets = {
        ConvexSetDescriptor::real_subspace(),
        ConvexSetDescriptor::positive_cone(),
        ConvexSetDescriptor::upper_box(RVec::Ones(A.rows())),
    };
    for (const auto& set : sets) {
      CriterionReport crit = criterion_check(af.triple, set,
                                             projection_lift(set), samples,
                                             cfg.seed);
      DynamicReport dyn =
          dynamic_invariance_check(A, set, t_grid, 50, cfg.seed);
      csv_body << set.name() << ',' << csv::number(crit.worst_margin) << ','
               << ((crit.pass && dyn.pass) ? "true" : "false") << '\n';
    }
    MarkovFlags flags = markov_suite(A, af.lumped_mass, 60, cfg.seed);
    csv_body << "markov_suite," << (flags.all() ? 0.0 : -1.0) << ','
             << (flags.all() ? "true" : "false") << '\n';
    emit("invariance.csv", csv_body.str());
  } else if (cfg.task == "gaffney") {
    if (!cfg.has_grid()) throw InvalidInput("gaffney expects a grid problem");
    AssembledForm af = assemble_form(cfg.grid());
    auto range = [&](const char* key, double lo_def, double hi_def) {
      double lo = lo_def, hi = hi_def;
      if (params.contains(key)) {
        lo = params.at(key)[0].get<double>();
        hi = params.at(key)[1].get<double>();
      }
      return nodes_in_range(af, lo, hi);
    };
    const auto omega1 = range("omega1", 0.0, 0.2 * cfg.grid().lengths[0]);
    const auto omega2 =
        range("omega2", 0.8 * cfg.grid().lengths[0], cfg.grid().lengths[0]);
    const auto t_grid = params_time_grid(params, parse_time_grid("1e-3:0.1:log20"));
    const double slack =
        cfg.tol > 0 ? cfg.tol : params.value("slack", 1.25);
    GaffneyReport rep =
        davies_gaffney_check(cfg.grid(), omega1, omega2, t_grid, slack);
    emit("gaffney.csv", rep.to_csv());
    manifest["gaffney_pass"] = rep.pass();
    manifest["M"] = rep.M;
    manifest["distance"] = rep.distance;
  } else if (cfg.task == "dtn") {
    if (!cfg.has_grid()) throw InvalidInput("dtn expects a grid problem");
    DtnProblem prob{cfg.grid(), params.value("lambda", 0.0)};
    DtnResult res = dtn_assemble(prob);
    emit("dtn.csv", matrix_csv(res.op.A));
    manifest["schur_cross_check"] = res.cross_check;
  } else if (cfg.task == "wentzell") {
    if (!cfg.has_grid()) throw InvalidInput("wentzell expects a grid problem");
    const GridProblem& g = cfg.grid();
    if (g.bc.kind != BcKind::wentzell)
      throw InvalidInput("wentzell task needs bc.kind == wentzell");
    WentzellProblem prob{g, g.bc.alpha, g.bc.B, 1.0};
    WentzellResult res = wentzell_assemble(prob);
    WentzellPositivity pos =
        wentzell_positivity_check(prob, params.value("samples", 40), cfg.seed);
    WentzellH1Report h1 = wentzell_h1_realization(prob);
    std::ostringstream body;
    body << "check,residual\n";
    body << "generator_characterization," << csv::number(res.char_residual)
         << '\n';
    body << "positivity_flags_agree," << (pos.agree() ? 0.0 : 1.0) << '\n';
    body << "h1_action," << csv::number(h1.action_residual) << '\n';
    body << "h1_boundary_identity," << csv::number(h1.boundary_residual)
         << '\n';
    body << "h1_spectrum_gap," << csv::number(h1.spectrum_gap) << '\n';
    emit("wentzell.csv", body.str());
  } else if (cfg.task == "multiplicative") {
    if (!cfg.has_grid())
      throw InvalidInput("multiplicative expects a grid problem");
    const std::string mode_str = params.value("mode", "mDm");
    MultiplicativeMode mode = MultiplicativeMode::m_delta_m;
    if (mode_str == "rhoD") mode = MultiplicativeMode::rho_delta;
    else if (mode_str == "Drho") mode = MultiplicativeMode::delta_rho;
    else if (mode_str != "mDm")
      throw InvalidInput("mode must be mDm, rhoD or Drho");
    RVec w;
    if (params.contains("weight") && params.at("weight").is_array()) {
      w.resize(params.at("weight").size());
      for (Index i = 0; i < w.size(); ++i)
        w(i) = params.at("weight")[i].get<double>();
    } else {
      const double c = params.value("weight", 1.0);
      w = RVec::Constant(cfg.grid().n_nodes(), c);
    }
    OperatorBundle op = multiplicative_ops(cfg.grid(), mode, w);
    emit("operator.csv", matrix_csv(op.A));
    const Mat gh = op.source.H.gram_matrix();
    manifest["selfadjoint_residual"] =
        (gh * op.A - (gh * op.A).adjoint()).norm() /
        std::max(1.0, op.A.norm());
  }

  manifest["outputs"] = outputs;
  manifest["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  write_file(fs::path(cfg.output) / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

Json witness_json(const MathRefusal& e) {
  Json j;
  j["error"] = e.kind();
  j["message"] = e.what();
  Json w = Json::array();
  for (Index i = 0; i < e.witness().size(); ++i)
    w.push_back(complex_to_json(e.witness()(i)));
  j["witness"] = w;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sectoria: sectorial forms, associated operators and their "
               "semigroups on finite grids"};
  app.require_subcommand(1);

  CliOverrides opt;
  const std::vector<std::string> tasks = {
      "analyze",    "extract", "evolve",   "regularize",    "invariance",
      "gaffney",    "dtn",     "wentzell", "multiplicative"};
  for (const auto& task : tasks) {
    auto* sub = app.add_subcommand(task);
    sub->add_option("--config", opt.config_path, "config JSON path")
        ->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_option("--tol", opt.tol, "tolerance/slack override");
    sub->add_option("--lambda", opt.lambda, "resolvent shift");
    sub->add_option("--t", opt.t_spec, "time grid A:B:logN or A:B:linN");
    sub->add_option("--n-max", opt.n_max, "largest n in dyadic sweeps");
    sub->add_option("--samples", opt.samples, "sample count");
  }

  CLI11_PARSE(app, argc, argv);

  if (const char* env = std::getenv("SECTORIA_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) Eigen::setNbThreads(cap);
  }

  try {
    const std::string task = app.get_subcommands().front()->get_name();
    const std::string bytes = read_file(opt.config_path);
    Json doc;
    try {
      doc = Json::parse(bytes);
    } catch (const Json::parse_error& e) {
      std::cerr << "config parse error: " << e.what() << "\n";
      return 2;
    }
    if (!doc.contains("task")) doc["task"] = task;
    if (doc.at("task").get<std::string>() != task) {
      std::cerr << "config task does not match the subcommand\n";
      return 2;
    }
    RunConfig cfg;
    try {
      cfg = run_config_from_json(doc);
    } catch (const InvalidInput& e) {
      std::cerr << "schema violation: " << e.what() << "\n";
      return 2;
    }
    if (opt.out) cfg.output = *opt.out;
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.tol) cfg.tol = *opt.tol;
    if (opt.lambda) cfg.params["lambda"] = *opt.lambda;
    if (opt.t_spec) cfg.params["t_grid"] = *opt.t_spec;
    if (opt.n_max) cfg.params["n_max"] = *opt.n_max;
    if (opt.samples) cfg.params["samples"] = *opt.samples;

    try {
      return run_task(cfg, bytes);
    } catch (const MathRefusal& e) {
      std::cerr << e.kind() << ": " << e.what() << "\n";
      fs::create_directories(cfg.output);
      write_file(fs::path(cfg.output) / "refusal.json",
                 witness_json(e).dump(2) + "\n");
      return 3;
    } catch (const InvalidInput& e) {
      std::cerr << "schema violation: " << e.what() << "\n";
      return 2;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "schema violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
