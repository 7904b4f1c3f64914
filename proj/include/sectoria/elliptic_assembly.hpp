#ifndef SECTORIA_ELLIPTIC_ASSEMBLY_HPP
#define SECTORIA_ELLIPTIC_ASSEMBLY_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sectoria/assoc_op.hpp"

namespace sectoria {

enum class BcKind { dirichlet, neumann, robin, wentzell };

struct BoundaryCondition {
  BcKind kind = BcKind::neumann;
  RVec beta;     // robin: coefficient per boundary node
  Vec alpha;     // wentzell: boundary potential per boundary node
  Mat B;         // wentzell: boundary operator on the trace space

  static BoundaryCondition dirichlet() { return {BcKind::dirichlet, {}, {}, {}}; }
  static BoundaryCondition neumann() { return {BcKind::neumann, {}, {}, {}}; }
  static BoundaryCondition robin(RVec beta_) {
    return {BcKind::robin, std::move(beta_), {}, {}};
  }
  static BoundaryCondition wentzell(Vec alpha_, Mat B_) {
    return {BcKind::wentzell, {}, std::move(alpha_), std::move(B_)};
  }
};

/// A tensor grid on [0,Lx] (x [0,Ly]) with cell-wise constant complex
/// coefficient matrices a_ij, a boundary descriptor, and an optional
/// positive node weight (the density of a weighted L2 space).
struct GridProblem {
  int dim = 1;
  std::array<double, 2> lengths = {1.0, 1.0};
  std::array<int, 2> cells = {1, 1};
  std::vector<Mat> coefficients;  // per cell, dim x dim (row-major cells in 2D)
  BoundaryCondition bc = BoundaryCondition::neumann();
  std::optional<RVec> weight;  // per node

  static GridProblem interval(double L, int n, Complex c,
                              BoundaryCondition bc = BoundaryCondition::neumann());
  static GridProblem square(double Lx, double Ly, int nx, int ny, Complex c,
                            BoundaryCondition bc = BoundaryCondition::neumann());

  int n_cells() const { return dim == 1 ? cells[0] : cells[0] * cells[1]; }
  int n_nodes() const {
    return dim == 1 ? cells[0] + 1 : (cells[0] + 1) * (cells[1] + 1);
  }
  double hx() const { return lengths[0] / cells[0]; }
  double hy() const { return lengths[1] / cells[1]; }

  /// Node coordinates, n_nodes x dim.
  RMat node_coordinates() const;
  std::vector<int> boundary_nodes() const;
  std::vector<int> interior_nodes() const;

  void validate() const;
};

/// Assembled discretization: stiffness (plus boundary terms), the lumped
/// mass diagonal, index bookkeeping, and the FormTriple handed to the
/// operator machinery. For Dirichlet data V holds interior nodes only.
struct AssembledForm {
  FormTriple triple;
  Mat stiffness;          // on V's node set (boundary terms included)
  RVec lumped_mass;       // on V's node set (weighted when weight present)
  RVec boundary_measure;  // sigma per boundary node (full grid ordering)
  std::vector<int> nodes;           // grid indices of V's nodes
  std::vector<int> boundary_nodes;  // grid indices (full ordering)
  RMat coordinates;                 // coordinates of V's nodes
  double theta = 0.0;               // max per-cell semi-angle
};

/// Flux-form finite differences (lumped P1): diagonal coefficients through
/// face averages, 2D cross terms through averaged corner differences.
/// Real scalar coefficients yield M-matrix generators, so the positivity
/// and markov suites hold discretely; with 2D cross terms present they are
/// only claimed for diagonal coefficient tensors.
/// Throws CellNotSectorial (with the cell index and a witness direction)
/// when some cell matrix has no semi-angle below pi/2.
AssembledForm assemble_form(const GridProblem& p);

struct GaffneyReport {
  std::vector<double> t_values;
  std::vector<double> lhs;     // |(S_t u, v)|
  std::vector<double> bound;   // e^{-d^2/(4Mt)} ||u|| ||v||
  std::vector<double> ratios;
  double M = 0.0;
  double distance = 0.0;
  double slack = 1.25;

  bool pass() const;
  std::string to_csv() const;  // t,lhs,bound,ratio
};

/// Off-diagonal decay harness with M = 3 (1 + tan theta)^2 (1 + sum ||a_ij||).
/// u, v are the indicator vectors of the node sets; t_grid entries below
/// h^2 are rejected (discretization error dominates there).
GaffneyReport davies_gaffney_check(const GridProblem& p,
                                   const std::vector<int>& omega1,
                                   const std::vector<int>& omega2,
                                   const std::vector<double>& t_grid,
                                   double slack = 1.25);

struct TailMassRow {
  double radius = 0.0;
  double tail_l1 = 0.0;
  double envelope = 0.0;  // c_hat R^-1 N^{(d+2)/4} e^{-R^2/(2N)}
};

struct TailMassReport {
  std::vector<TailMassRow> rows;
  double c_hat = 0.0;
  double N = 0.0;
  bool pass = false;
};

/// L1 mass of S_t u beyond radius 2R versus the Gaussian envelope with
/// N = 4Mt; the prefactor is fitted by least squares on the log scale.
TailMassReport tail_mass_check(const GridProblem& p, const Vec& u, double t,
                               const std::vector<double>& r_grid);

/// max_t |(S_t u, 1) - (u, 1)| over the grid plus the S_t 1 = 1 residual;
/// requires Neumann data with real coefficients.
struct ConservationReport {
  double worst_mass_drift = 0.0;
  double worst_ones_residual = 0.0;
};
ConservationReport conservation_check(const GridProblem& p, const Vec& u,
                                      const std::vector<double>& t_grid);

enum class MultiplicativeMode { m_delta_m, rho_delta, delta_rho };

/// Multiplicative perturbations of the Dirichlet operator: m Delta m on
/// L2, rho Delta on L2(1/rho dx), Delta rho on L2(rho dx); all extracted
/// through the (a, j) machinery with the appropriate weighted Grams.
OperatorBundle multiplicative_ops(const GridProblem& p, MultiplicativeMode mode,
                                  const RVec& weight_nodes);

/// Residual of the discrete Robin identity
/// a_N(u, v) - (A u, v)_H + sum_Gamma beta (Tr u) conj(Tr v) sigma = 0
/// over a spanning set of v.
double robin_trace_residual(const GridProblem& p, const OperatorBundle& op,
                            const Vec& u);

}  // namespace sectoria

#endif
