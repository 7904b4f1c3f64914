#include "sectoria/elliptic_assembly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sectoria/csv.hpp"
#include "sectoria/evolution.hpp"

namespace sectoria {

// --- GridProblem -----------------------------------------------------------

GridProblem GridProblem::interval(double L, int n, Complex c,
                                  BoundaryCondition bc_) {
  GridProblem p;
  p.dim = 1;
  p.lengths = {L, 1.0};
  p.cells = {n, 1};
  p.coefficients.assign(n, (Mat(1, 1) << c).finished());
  p.bc = std::move(bc_);
  return p;
}

GridProblem GridProblem::square(double Lx, double Ly, int nx, int ny, Complex c,
                                BoundaryCondition bc_) {
  GridProblem p;
  p.dim = 2;
  p.lengths = {Lx, Ly};
  p.cells = {nx, ny};
  Mat cc = Mat::Zero(2, 2);
  cc(0, 0) = cc(1, 1) = c;
  p.coefficients.assign(nx * ny, cc);
  p.bc = std::move(bc_);
  return p;
}

RMat GridProblem::node_coordinates() const {
  RMat coords(n_nodes(), dim);
  if (dim == 1) {
    for (int i = 0; i <= cells[0]; ++i) coords(i, 0) = i * hx();
  } else {
    int k = 0;
    for (int j = 0; j <= cells[1]; ++j)
      for (int i = 0; i <= cells[0]; ++i, ++k) {
        coords(k, 0) = i * hx();
        coords(k, 1) = j * hy();
      }
  }
  return coords;
}

std::vector<int> GridProblem::boundary_nodes() const {
  std::vector<int> out;
  if (dim == 1) {
    out = {0, cells[0]};
  } else {
    const int nx = cells[0], ny = cells[1];
    int k = 0;
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i, ++k)
        if (i == 0 || i == nx || j == 0 || j == ny) out.push_back(k);
  }
  return out;
}

std::vector<int> GridProblem::interior_nodes() const {
  std::vector<int> out;
  const auto bdry = boundary_nodes();
  std::set<int> bset(bdry.begin(), bdry.end());
  for (int k = 0; k < n_nodes(); ++k)
    if (!bset.count(k)) out.push_back(k);
  return out;
}

void GridProblem::validate() const {
  if (dim != 1 && dim != 2) throw InvalidInput("dim must be 1 or 2");
  if (lengths[0] <= 0 || (dim == 2 && lengths[1] <= 0))
    throw InvalidInput("lengths must be positive");
  if (cells[0] < 1 || (dim == 2 && cells[1] < 1))
    throw InvalidInput("cell counts must be positive");
  if (static_cast<int>(coefficients.size()) != n_cells())
    throw InvalidInput("one coefficient matrix per cell required");
  for (const Mat& c : coefficients)
    if (c.rows() != dim || c.cols() != dim)
      throw InvalidInput("coefficient matrices must be dim x dim");
  if (weight) {
    if (weight->size() != n_nodes())
      throw InvalidInput("weight must have one entry per node");
    if (weight->minCoeff() <= 0.0)
      throw NonPositiveWeight("node weights must be strictly positive");
  }
}

// --- assembly ---------------------------------------------------------------

namespace {

// Max semi-angle over cells; throws on a cell whose matrix leaves every
// sector (Re part not PSD, or skew mass on the Re-kernel).
double cell_sector_angle(const std::vector<Mat>& coeffs) {
  double worst = 0.0;
  for (std::size_t c = 0; c < coeffs.size(); ++c) {
    const Mat hm = hermitian_part(coeffs[c]);
    const Mat k = skew_part(coeffs[c]);
    const double scale = std::max(1.0, coeffs[c].norm());
    Eigen::SelfAdjointEigenSolver<Mat> es(hm);
    if (es.eigenvalues()(0) < -1e-12 * scale)
      throw CellNotSectorial("cell coefficient has Re < 0 along a direction",
                             static_cast<int>(c), es.eigenvectors().col(0));
    if (k.norm() <= 1e-300 * scale) continue;
    const double eps = 1e-12 * std::max(hm.norm(), 1e-300);
    const double tt = max_abs_eig_pencil(
        k, hm + eps * Mat::Identity(hm.rows(), hm.cols()));
    if (tt > 1e8) {
      Eigen::SelfAdjointEigenSolver<Mat> ek(k);
      const auto& ev = ek.eigenvalues();
      const Index w = std::abs(ev(0)) > std::abs(ev(ev.size() - 1))
                          ? 0 : ev.size() - 1;
      throw CellNotSectorial("cell coefficient has no semi-angle below pi/2",
                             static_cast<int>(c), ek.eigenvectors().col(w));
    }
    worst = std::max(worst, std::atan(tt));
  }
  return worst;
}

// Lumped node mass on the full grid (trapezoid weights), dim 1 or 2.
RVec full_lumped_mass(const GridProblem& p) {
  RVec m(p.n_nodes());
  if (p.dim == 1) {
    const double h = p.hx();
    m.setConstant(h);
    m(0) = m(p.cells[0]) = h / 2;
  } else {
    const int nx = p.cells[0], ny = p.cells[1];
    const double area = p.hx() * p.hy();
    int k = 0;
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i, ++k) {
        double f = 1.0;
        if (i == 0 || i == nx) f *= 0.5;
        if (j == 0 || j == ny) f *= 0.5;
        m(k) = area * f;
      }
  }
  if (p.weight)
    for (int i = 0; i < p.n_nodes(); ++i) m(i) *= (*p.weight)(i);
  return m;
}

RVec full_boundary_measure(const GridProblem& p) {
  // 1D: unit point masses; 2D: node-associated edge lengths.
  RVec sigma = RVec::Zero(p.n_nodes());
  if (p.dim == 1) {
    sigma(0) = sigma(p.cells[0]) = 1.0;
  } else {
    const int nx = p.cells[0], ny = p.cells[1];
    const double hx = p.hx(), hy = p.hy();
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int i = 0; i < nx; ++i) {
      for (int j : {0, ny}) {
        sigma(id(i, j)) += hx / 2;
        sigma(id(i + 1, j)) += hx / 2;
      }
    }
    for (int j = 0; j < ny; ++j) {
      for (int i : {0, nx}) {
        sigma(id(i, j)) += hy / 2;
        sigma(id(i, j + 1)) += hy / 2;
      }
    }
  }
  return sigma;
}

Mat full_stiffness(const GridProblem& p) {
  const int n = p.n_nodes();
  Mat s = Mat::Zero(n, n);
  if (p.dim == 1) {
    const double h = p.hx();
    for (int c = 0; c < p.cells[0]; ++c) {
      const Complex cc = p.coefficients[c](0, 0);
      const double w = 1.0 / h;
      s(c, c) += cc * w;
      s(c + 1, c + 1) += cc * w;
      s(c, c + 1) -= cc * w;
      s(c + 1, c) -= cc * w;
    }
    return s;
  }
  const int nx = p.cells[0], ny = p.cells[1];
  const double hx = p.hx(), hy = p.hy();
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int cj = 0; cj < ny; ++cj) {
    for (int ci = 0; ci < nx; ++ci) {
      const Mat& cc = p.coefficients[cj * nx + ci];
      const int a = id(ci, cj), b = id(ci + 1, cj);
      const int c = id(ci, cj + 1), d = id(ci + 1, cj + 1);
      // a11: x-fluxes on the two horizontal node pairs (trapezoid in y)
      {
        const Complex w = cc(0, 0) * hy / hx * 0.5;
        for (auto [p1, p2] : {std::pair{a, b}, std::pair{c, d}}) {
          s(p1, p1) += w;
          s(p2, p2) += w;
          s(p1, p2) -= w;
          s(p2, p1) -= w;
        }
      }
      // a22: y-fluxes on the two vertical node pairs
      {
        const Complex w = cc(1, 1) * hx / hy * 0.5;
        for (auto [p1, p2] : {std::pair{a, c}, std::pair{b, d}}) {
          s(p1, p1) += w;
          s(p2, p2) += w;
          s(p1, p2) -= w;
          s(p2, p1) -= w;
        }
      }
      // cross terms via averaged corner differences:
      // dx u = (u_b - u_a + u_d - u_c)/(2 hx), dy analogous
      if (cc(0, 1) != Complex(0) || cc(1, 0) != Complex(0)) {
        Vec gx = Vec::Zero(4), gy = Vec::Zero(4);  // order a,b,c,d
        gx << -1, 1, -1, 1;
        gx /= 2 * hx;
        gy << -1, -1, 1, 1;
        gy /= 2 * hy;
        const double area = hx * hy;
        const int idx[4] = {a, b, c, d};
        // integral of a12 (dx u)(conj dy v) + a21 (dy u)(conj dx v)
        for (int r = 0; r < 4; ++r) {
          for (int q = 0; q < 4; ++q) {
            const Complex val =
                area * (cc(0, 1) * gx(q) * std::conj(gy(r)) +
                        cc(1, 0) * gy(q) * std::conj(gx(r)));
            s(idx[r], idx[q]) += val;
          }
        }
      }
    }
  }
  return s;
}

Mat select_rows_cols(const Mat& m, const std::vector<int>& idx) {
  Mat out(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c)
      out(r, c) = m(idx[r], idx[c]);
  return out;
}

}  // namespace

AssembledForm assemble_form(const GridProblem& p) {
  p.validate();
  AssembledForm out;
  out.theta = cell_sector_angle(p.coefficients);

  Mat s = full_stiffness(p);
  const RVec mass = full_lumped_mass(p);
  out.boundary_measure = full_boundary_measure(p);
  out.boundary_nodes = p.boundary_nodes();

  if (p.bc.kind == BcKind::robin) {
    if (p.bc.beta.size() != static_cast<Index>(out.boundary_nodes.size()))
      throw InvalidInput("robin beta needs one entry per boundary node");
    for (std::size_t b = 0; b < out.boundary_nodes.size(); ++b) {
      const int node = out.boundary_nodes[b];
      s(node, node) += p.bc.beta(b) * out.boundary_measure(node);
    }
  }

  const bool dirichlet = p.bc.kind == BcKind::dirichlet;
  out.nodes = dirichlet ? p.interior_nodes()
                        : [&] {
                            std::vector<int> all(p.n_nodes());
                            for (int i = 0; i < p.n_nodes(); ++i) all[i] = i;
                            return all;
                          }();

  out.stiffness = select_rows_cols(s, out.nodes);
  out.lumped_mass.resize(out.nodes.size());
  const RMat coords = p.node_coordinates();
  out.coordinates.resize(out.nodes.size(), p.dim);
  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    out.lumped_mass(i) = mass(out.nodes[i]);
    out.coordinates.row(i) = coords.row(out.nodes[i]);
  }

  const Index n = static_cast<Index>(out.nodes.size());
  out.triple.H = HilbertSpaceSpec::weighted(out.lumped_mass);
  out.triple.V.dim = n;
  // H1-type Gram: Re stiffness + mass keeps the V geometry positive.
  out.triple.V.gram =
      hermitian_part(out.stiffness) + Mat(out.lumped_mass.cast<Complex>().asDiagonal());
  out.triple.form = out.stiffness;
  out.triple.jmap = Mat::Identity(n, n);
  return out;
}

// --- Davies-Gaffney ----------------------------------------------------------

namespace {

double coefficient_sup_sum(const GridProblem& p) {
  double s = 0.0;
  for (int i = 0; i < p.dim; ++i)
    for (int j = 0; j < p.dim; ++j) {
      double sup = 0.0;
      for (const Mat& c : p.coefficients)
        sup = std::max(sup, std::abs(c(i, j)));
      s += sup;
    }
  return s;
}

Vec indicator(Index n, const std::vector<int>& idx) {
  Vec u = Vec::Zero(n);
  for (int i : idx) u(i) = 1.0;
  return u;
}

double node_set_distance(const RMat& coords, const std::vector<int>& s1,
                         const std::vector<int>& s2) {
  double d = std::numeric_limits<double>::infinity();
  for (int i : s1)
    for (int j : s2)
      d = std::min(d, (coords.row(i) - coords.row(j)).norm());
  return d;
}

}  // namespace

bool GaffneyReport::pass() const {
  for (double r : ratios)
    if (!(r <= slack)) return false;
  return true;
}

std::string GaffneyReport::to_csv() const {
  std::ostringstream out;
  out << "t,lhs,bound,ratio\n";
  for (std::size_t i = 0; i < t_values.size(); ++i)
    out << csv::number(t_values[i]) << ',' << csv::number(lhs[i]) << ','
        << csv::number(bound[i]) << ',' << csv::number(ratios[i]) << '\n';
  return out.str();
}

GaffneyReport davies_gaffney_check(const GridProblem& p,
                                   const std::vector<int>& omega1,
                                   const std::vector<int>& omega2,
                                   const std::vector<double>& t_grid,
                                   double slack) {
  AssembledForm af = assemble_form(p);
  if (p.bc.kind == BcKind::dirichlet)
    throw InvalidInput("use the full node ordering of Neumann/Robin grids");
  {
    std::set<int> s1(omega1.begin(), omega1.end());
    for (int i : omega2)
      if (s1.count(i)) throw SetsOverlap("omega1 and omega2 share a node");
  }

  GaffneyReport report;
  report.slack = slack;
  report.M = 3.0 * std::pow(1.0 + std::tan(af.theta), 2.0) *
             (1.0 + coefficient_sup_sum(p));
  report.distance = node_set_distance(af.coordinates, omega1, omega2);
  if (!(report.distance > 0))
    throw SetsOverlap("node sets have zero distance");

  const double t_min = p.hx() * p.hx();
  const Mat gh = af.triple.H.gram_matrix();
  // j is the identity here, so the associated operator is G^-1 S directly;
  // the certificate machinery is not needed at harness scale.
  const Mat A = af.lumped_mass.cwiseInverse().cast<Complex>().asDiagonal() *
                af.stiffness;
  Propagator prop(A, gh);

  const Vec u = indicator(af.triple.H.dim, omega1);
  const Vec v = indicator(af.triple.H.dim, omega2);
  const double norm_u = af.triple.H.norm(u);
  const double norm_v = af.triple.H.norm(v);

  for (double t : t_grid) {
    if (t < t_min)
      throw InvalidInput("t below t_min = h^2; discretization error dominates");
    const Vec su = prop.apply(t, u);
    const double lhs = std::abs(Complex(v.dot(gh * su)));
    const double bound =
        std::exp(-report.distance * report.distance / (4.0 * report.M * t)) *
        norm_u * norm_v;
    report.t_values.push_back(t);
    report.lhs.push_back(lhs);
    report.bound.push_back(bound);
    report.ratios.push_back(lhs / bound);
  }
  return report;
}

TailMassReport tail_mass_check(const GridProblem& p, const Vec& u, double t,
                               const std::vector<double>& r_grid) {
  AssembledForm af = assemble_form(p);
  const Index n = af.triple.H.dim;
  if (u.size() != n) throw InvalidInput("u has wrong dimension");
  if (r_grid.empty()) throw InvalidInput("empty radius grid");

  // Support centre and radius in grid coordinates.
  RVec centre = RVec::Zero(p.dim);
  double mass_count = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double w = std::abs(u(i));
    if (w > 0) {
      centre += w * af.coordinates.row(i).transpose();
      mass_count += w;
    }
  }
  if (mass_count == 0.0) {
    TailMassReport rep;
    rep.pass = true;
    for (double r : r_grid) rep.rows.push_back({r, 0.0, 0.0});
    return rep;
  }
  centre /= mass_count;
  double supp_radius = 0.0;
  for (Index i = 0; i < n; ++i)
    if (std::abs(u(i)) > 0)
      supp_radius = std::max(
          supp_radius, (af.coordinates.row(i).transpose() - centre).norm());
  const double r_min = *std::min_element(r_grid.begin(), r_grid.end());
  if (supp_radius > r_min)
    throw SupportTooLarge("supp u exceeds the smallest radius in r_grid");

  const double theta = af.theta;
  const double M = 3.0 * std::pow(1.0 + std::tan(theta), 2.0) *
                   (1.0 + coefficient_sup_sum(p));
  TailMassReport rep;
  rep.N = 4.0 * M * t;

  const Mat A = af.lumped_mass.cwiseInverse().cast<Complex>().asDiagonal() *
                af.stiffness;
  Propagator prop(A, af.triple.H.gram_matrix());
  const Vec su = prop.apply(t, u);

  std::vector<double> log_ratio;
  for (double r : r_grid) {
    double tail = 0.0;
    for (Index i = 0; i < n; ++i) {
      if ((af.coordinates.row(i).transpose() - centre).norm() > 2.0 * r)
        tail += af.lumped_mass(i) * std::abs(su(i));
    }
    const double shape = std::pow(rep.N, (p.dim + 2) / 4.0) / r *
                         std::exp(-r * r / (2.0 * rep.N));
    rep.rows.push_back({r, tail, shape});
    if (tail > 0 && shape > 0) log_ratio.push_back(std::log(tail / shape));
  }
  // Least-squares constant on the log scale (the mean log-ratio), fitted
  // on the smaller half of the radius grid; the envelope must then
  // dominate every strictly larger radius.
  const std::size_t fit_count = std::max<std::size_t>(1, log_ratio.size() / 2);
  if (!log_ratio.empty()) {
    double s = 0.0;
    for (std::size_t i = 0; i < fit_count; ++i) s += log_ratio[i];
    rep.c_hat = std::exp(s / fit_count);
  }
  rep.pass = true;
  const double floor = 1e-14 * u.cwiseAbs().sum();
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    auto& row = rep.rows[i];
    row.envelope = rep.c_hat * row.envelope;
    if (i >= fit_count && row.tail_l1 > row.envelope * (1.0 + 1e-9) + floor)
      rep.pass = false;
  }
  return rep;
}

ConservationReport conservation_check(const GridProblem& p, const Vec& u,
                                      const std::vector<double>& t_grid) {
  if (p.bc.kind != BcKind::neumann)
    throw WrongBoundaryCondition("conservation requires Neumann data");
  for (const Mat& c : p.coefficients)
    if (c.imag().norm() > 0)
      throw WrongBoundaryCondition("conservation requires real coefficients");

  AssembledForm af = assemble_form(p);
  const Mat gh = af.triple.H.gram_matrix();
  const Mat A = af.lumped_mass.cwiseInverse().cast<Complex>().asDiagonal() *
                af.stiffness;
  Propagator prop(A, gh);

  const Vec ones = Vec::Ones(af.triple.H.dim);
  const Complex mass0 = ones.dot(gh * u);

  ConservationReport rep;
  for (double t : t_grid) {
    const Vec su = prop.apply(t, u);
    rep.worst_mass_drift =
        std::max(rep.worst_mass_drift, std::abs(Complex(ones.dot(gh * su)) - mass0));
    const Vec s1 = prop.apply(t, ones);
    rep.worst_ones_residual =
        std::max(rep.worst_ones_residual, (s1 - ones).cwiseAbs().maxCoeff());
  }
  return rep;
}

// --- multiplicative perturbations ---------------------------------------------

OperatorBundle multiplicative_ops(const GridProblem& p, MultiplicativeMode mode,
                                  const RVec& weight_nodes) {
  GridProblem q = p;
  q.bc = BoundaryCondition::dirichlet();
  q.weight.reset();
  AssembledForm af = assemble_form(q);
  const Index n = static_cast<Index>(af.nodes.size());

  if (weight_nodes.size() != q.n_nodes() &&
      weight_nodes.size() != n)
    throw InvalidInput("weight vector must cover the nodes");
  RVec w(n);
  if (weight_nodes.size() == n) {
    w = weight_nodes;
  } else {
    for (Index i = 0; i < n; ++i) w(i) = weight_nodes(af.nodes[i]);
  }
  if (w.minCoeff() <= 0.0)
    throw NonPositiveWeight("multiplicative weight must be positive");

  FormTriple t;
  t.form = af.stiffness;
  t.V.dim = n;

  switch (mode) {
    case MultiplicativeMode::m_delta_m: {
      // j(u) = u / m into plain L2; V carries the Dirichlet-form norm.
      t.H = HilbertSpaceSpec::weighted(af.lumped_mass);
      t.jmap = w.cwiseInverse().cast<Complex>().asDiagonal();
      break;
    }
    case MultiplicativeMode::rho_delta: {
      // embedding into L2(1/rho dx)
      t.H = HilbertSpaceSpec::weighted(
          (af.lumped_mass.array() / w.array()).matrix());
      t.jmap = Mat::Identity(n, n);
      break;
    }
    case MultiplicativeMode::delta_rho: {
      // j(u) = u / rho into L2(rho dx)
      t.H = HilbertSpaceSpec::weighted(
          (af.lumped_mass.array() * w.array()).matrix());
      t.jmap = w.cwiseInverse().cast<Complex>().asDiagonal();
      break;
    }
  }
  t.V.gram = hermitian_part(t.form) + t.jmap_gram();
  return extract_operator(t);
}

double robin_trace_residual(const GridProblem& p, const OperatorBundle& op,
                            const Vec& u) {
  if (p.bc.kind != BcKind::robin)
    throw WrongBoundaryCondition("robin_trace_residual needs robin data");
  // Neumann part of the form (no boundary term).
  GridProblem q = p;
  q.bc = BoundaryCondition::neumann();
  AssembledForm neumann = assemble_form(q);

  const Index n = neumann.triple.V.dim;
  if (u.size() != n || op.A.rows() != n)
    throw InvalidInput("dimension mismatch");

  const Mat gh = op.source.H.gram_matrix();
  const Vec au = op.A * u;
  const auto bnodes = q.boundary_nodes();

  double worst = 0.0;
  for (Index k = 0; k < n; ++k) {
    const Vec v = Vec::Unit(n, k);
    Complex residual = v.dot(neumann.stiffness * u) - v.dot(gh * au);
    for (std::size_t b = 0; b < bnodes.size(); ++b) {
      if (bnodes[b] == static_cast<int>(k))
        residual += p.bc.beta(b) * neumann.boundary_measure(bnodes[b]) *
                    u(bnodes[b]);
    }
    worst = std::max(worst, std::abs(residual));
  }
  return worst;
}

}  // namespace sectoria
