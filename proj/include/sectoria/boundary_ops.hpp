#ifndef SECTORIA_BOUNDARY_OPS_HPP
#define SECTORIA_BOUNDARY_OPS_HPP

#include "sectoria/elliptic_assembly.hpp"

namespace sectoria {

/// Dirichlet-to-Neumann data: energy form minus lambda times mass, with j
/// the restriction to boundary nodes. lambda must keep a guard distance of
/// 1e-8 from the discrete interior Dirichlet spectrum.
struct DtnProblem {
  GridProblem grid;
  double lambda = 0.0;
};

struct DtnResult {
  OperatorBundle op;        // D_lambda on the boundary space
  Mat schur;                // independent Schur-complement route
  double cross_check = 0.0; // relative gap between the two routes
  RVec sigma;               // boundary measure (Gram weights)
  std::vector<int> boundary_nodes;
};

/// Builds D_lambda through the V(a)-restricted extraction and cross-checks
/// it against the Schur complement of (stiffness - lambda mass) onto the
/// boundary nodes. Throws LambdaOnSpectrum near interior Dirichlet
/// eigenvalues (where the V = V(a) + ker j decomposition degenerates).
DtnResult dtn_assemble(const DtnProblem& p);

/// Interior Dirichlet eigenvalues of the grid problem (for spectrum guards).
RVec interior_dirichlet_eigenvalues(const GridProblem& grid);

/// Closed-form interval operator:
/// (sqrt(l)/sin(sqrt(l) L)) [[cos(sqrt(l) L), -1], [-1, cos(sqrt(l) L)]],
/// with the lambda -> 0 limit (1/L) [[1,-1],[-1,1]]; negative lambda goes
/// through the hyperbolic branch.
Mat dtn_oracle_interval(double lambda, double L);

/// Wentzell data on the coupled space L2(Omega) + L2(Gamma): alpha is the
/// boundary potential, B the boundary operator on traces. omega_cert is
/// the witness for omega ||B phi||^2 + Re alpha |phi|^2 >= 0.
struct WentzellProblem {
  GridProblem grid;
  Vec alpha;  // per boundary node
  Mat B;      // n_boundary x n_boundary
  double omega_cert = 1.0;
};

struct WentzellResult {
  OperatorBundle op;          // on interior + boundary coupled space
  std::vector<int> interior;  // grid indices of the L2(Omega) component
  std::vector<int> boundary;  // grid indices of the trace component
  RVec sigma;                 // boundary measure
  Mat B;
  Vec alpha;
  double char_residual = 0.0;  // domain-characterization residual
};

/// Couples the interior form with the boundary dynamics via
/// j(u) = (u|interior, B Tr u). Requires the omega certificate and an
/// invertible B (a degenerate B decouples the boundary component and is
/// rejected here). The returned residual checks, on a spanning set,
/// A (u, B Tr u) = (A_int u, psi) with B* psi - alpha Tr u equal to the
/// discrete normal derivative.
WentzellResult wentzell_assemble(const WentzellProblem& p);

struct WentzellPositivity {
  bool lattice_homomorphism = false;
  bool dynamically_positive = false;
  bool agree() const { return lattice_homomorphism == dynamically_positive; }
};

/// Compares (B phi)^+ = B(phi^+) on sampled phi against sampled invariance
/// of the product positive cone under the coupled semigroup.
WentzellPositivity wentzell_positivity_check(const WentzellProblem& p,
                                             int samples = 40,
                                             std::uint64_t seed = 0);

struct WentzellH1Report {
  Mat A1;                     // realization on the node space
  double action_residual = 0.0;    // interior part of A1 u vs discrete Au
  double boundary_residual = 0.0;  // B*B Tr(A1 u) - alpha Tr u vs normal deriv
  double spectrum_gap = 0.0;       // Hausdorff gap of eigenvalue sets
};

/// H1-type realization A1 = j^-1 A j with its consistency checks.
WentzellH1Report wentzell_h1_realization(const WentzellProblem& p);

}  // namespace sectoria

#endif
