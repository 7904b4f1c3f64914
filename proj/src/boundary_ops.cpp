#include "sectoria/boundary_ops.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

#include "sectoria/evolution.hpp"

namespace sectoria {

namespace {

Mat pick(const Mat& m, const std::vector<int>& rows,
         const std::vector<int>& cols) {
  Mat out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(r, c) = m(rows[r], cols[c]);
  return out;
}

}  // namespace

RVec interior_dirichlet_eigenvalues(const GridProblem& grid) {
  GridProblem q = grid;
  q.bc = BoundaryCondition::dirichlet();
  AssembledForm af = assemble_form(q);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(
      hermitian_part(af.stiffness),
      Mat(af.lumped_mass.cast<Complex>().asDiagonal()),
      Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  return es.eigenvalues();
}

DtnResult dtn_assemble(const DtnProblem& p) {
  GridProblem grid = p.grid;
  grid.bc = BoundaryCondition::neumann();
  grid.validate();
  for (const Mat& c : grid.coefficients)
    if (c.imag().norm() > 0)
      throw InvalidInput("dtn_assemble expects real coefficients");

  const RVec spec = interior_dirichlet_eigenvalues(grid);
  for (Index i = 0; i < spec.size(); ++i) {
    if (std::abs(p.lambda - spec(i)) < 1e-8)
      throw LambdaOnSpectrum(
          "lambda within 1e-8 of an interior Dirichlet eigenvalue " +
          std::to_string(spec(i)));
  }

  AssembledForm af = assemble_form(grid);
  const Index n = af.triple.V.dim;
  const auto boundary = grid.boundary_nodes();
  const auto interior = grid.interior_nodes();
  const Index nb = static_cast<Index>(boundary.size());

  RVec sigma(nb);
  for (Index b = 0; b < nb; ++b) sigma(b) = af.boundary_measure(boundary[b]);

  // Energy form minus the lambda mass term, with j = trace.
  FormTriple t;
  t.V = af.triple.V;  // H1-type Gram from the assembly
  t.H = HilbertSpaceSpec::weighted(sigma);
  t.form = af.stiffness -
           p.lambda * Mat(af.lumped_mass.cast<Complex>().asDiagonal());
  t.jmap = Mat::Zero(nb, n);
  for (Index b = 0; b < nb; ++b) t.jmap(b, boundary[b]) = 1.0;
  // Keep the V geometry positive definite for any lambda.
  t.V.gram = hermitian_part(af.stiffness) +
             Mat(af.lumped_mass.cast<Complex>().asDiagonal());

  DtnResult out;
  out.boundary_nodes = boundary;
  out.sigma = sigma;
  try {
    out.op = extract_operator_Va(t);
  } catch (const SumDecompositionFails& e) {
    throw LambdaOnSpectrum(std::string("decomposition degenerates: ") +
                           e.what());
  }

  // Independent route: Schur complement of (S - lambda M) onto the boundary,
  // read in the sigma geometry.
  const Mat full = t.form;
  const Mat t_ii = pick(full, interior, interior);
  const Mat t_ib = pick(full, interior, boundary);
  const Mat t_bi = pick(full, boundary, interior);
  const Mat t_bb = pick(full, boundary, boundary);
  const Mat schur_form =
      interior.empty() ? t_bb : Mat(t_bb - t_bi * t_ii.partialPivLu().solve(t_ib));
  out.schur = Mat(sigma.cwiseInverse().cast<Complex>().asDiagonal()) * schur_form;

  out.cross_check =
      (out.op.A - out.schur).norm() / std::max(1.0, out.schur.norm());
  return out;
}

Mat dtn_oracle_interval(double lambda, double L) {
  Mat d(2, 2);
  if (lambda == 0.0) {
    d << 1, -1, -1, 1;
    return d / L;
  }
  const Complex root = std::sqrt(Complex(lambda, 0.0));
  const Complex sn = std::sin(root * L);
  if (std::abs(sn) < 1e-12 * std::max(1.0, std::abs(root * L)))
    throw OnDirichletSpectrum("sqrt(lambda) L is a multiple of pi");
  const Complex c = std::cos(root * L);
  d << c, -1, -1, c;
  return (root / sn) * d;
}

// --- Wentzell ----------------------------------------------------------------

namespace {

struct WentzellSpaces {
  FormTriple triple;
  std::vector<int> interior;
  std::vector<int> boundary;
  RVec sigma;
  AssembledForm af;
  bool decoupled = false;  // B = 0: j maps into the L2(Omega) factor only
};

WentzellSpaces wentzell_spaces(const WentzellProblem& p) {
  GridProblem grid = p.grid;
  grid.bc = BoundaryCondition::neumann();
  AssembledForm af = assemble_form(grid);
  const Index n = af.triple.V.dim;
  const auto boundary = grid.boundary_nodes();
  const auto interior = grid.interior_nodes();
  const Index nb = static_cast<Index>(boundary.size());
  const Index ni = static_cast<Index>(interior.size());

  if (p.alpha.size() != nb)
    throw InvalidInput("alpha needs one entry per boundary node");
  if (p.B.rows() != nb || p.B.cols() != nb)
    throw InvalidInput("B must act on the boundary trace space");

  RVec sigma(nb);
  for (Index b = 0; b < nb; ++b) sigma(b) = af.boundary_measure(boundary[b]);

  // omega ||B phi||^2 + Re alpha |phi|^2 >= 0 for the declared omega, and
  // if not, for some larger omega (doubling search before giving up).
  const Mat gb = sigma.cast<Complex>().asDiagonal();
  const Mat bb = p.B.adjoint() * gb * p.B;
  Mat re_alpha = Mat::Zero(nb, nb);
  for (Index b = 0; b < nb; ++b) re_alpha(b, b) = p.alpha(b).real() * sigma(b);
  const double scale = std::max(1.0, bb.norm() + re_alpha.norm());
  double omega = std::max(p.omega_cert, 1e-8);
  bool certified = false;
  for (int i = 0; i < 70 && !certified; ++i, omega *= 2.0) {
    certified = min_eig_hermitian(omega * bb + re_alpha) >= -1e-12 * scale;
  }
  if (!certified) {
    Eigen::SelfAdjointEigenSolver<Mat> es(re_alpha);
    throw CertificateFails(
        "omega ||B phi||^2 + Re alpha |phi|^2 >= 0 fails for every omega",
        es.eigenvectors().col(0));
  }

  WentzellSpaces sp;
  sp.decoupled = p.B.norm() == 0.0;
  if (!sp.decoupled) {
    // Invertible B keeps j(V) dense in the coupled space; between zero and
    // full rank the closure of the graph has no clean finite stand-in.
    Eigen::BDCSVD<Mat> svd(p.B);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) <= sv(0) * rank_tol)
      throw InvalidInput(
          "wentzell boundary operator B must be invertible or zero");
  }
  sp.interior = interior;
  sp.boundary = boundary;
  sp.sigma = sigma;

  FormTriple t;
  t.V.dim = n;
  t.form = af.stiffness;
  for (Index b = 0; b < nb; ++b)
    t.form(boundary[b], boundary[b]) += p.alpha(b) * sigma(b);
  t.V.gram = hermitian_part(af.stiffness) +
             Mat(af.lumped_mass.cast<Complex>().asDiagonal());

  if (sp.decoupled) {
    // closure of j(V) is the L2(Omega) factor; alpha needs Re alpha >= 0
    // to keep the boundary absorption accretive on ker j
    for (Index b = 0; b < nb; ++b)
      if (p.alpha(b).real() < 0.0)
        throw CertificateFails("B = 0 requires Re alpha >= 0");
    RVec h_weights(ni);
    for (Index i = 0; i < ni; ++i) h_weights(i) = af.lumped_mass(interior[i]);
    t.H = HilbertSpaceSpec::weighted(h_weights);
    t.jmap = Mat::Zero(ni, n);
    for (Index i = 0; i < ni; ++i) t.jmap(i, interior[i]) = 1.0;
  } else {
    // H = L2(interior) + sigma-weighted L2(Gamma)
    RVec h_weights(ni + nb);
    for (Index i = 0; i < ni; ++i) h_weights(i) = af.lumped_mass(interior[i]);
    for (Index b = 0; b < nb; ++b) h_weights(ni + b) = sigma(b);
    t.H = HilbertSpaceSpec::weighted(h_weights);
    t.jmap = Mat::Zero(ni + nb, n);
    for (Index i = 0; i < ni; ++i) t.jmap(i, interior[i]) = 1.0;
    for (Index b = 0; b < nb; ++b)
      for (Index b2 = 0; b2 < nb; ++b2)
        t.jmap(ni + b, boundary[b2]) = p.B(b, b2);
  }

  sp.af = std::move(af);
  sp.triple = std::move(t);
  return sp;
}

}  // namespace

WentzellResult wentzell_assemble(const WentzellProblem& p) {
  WentzellSpaces sp = wentzell_spaces(p);
  WentzellResult out;
  out.interior = sp.interior;
  out.boundary = sp.boundary;
  out.sigma = sp.sigma;
  out.B = p.B;
  out.alpha = p.alpha;
  out.op = extract_operator(sp.triple);

  const Index n = sp.triple.V.dim;
  const Index ni = static_cast<Index>(sp.interior.size());
  const Index nb = static_cast<Index>(sp.boundary.size());

  if (sp.decoupled) {
    // B = 0: the operator lives on the L2(Omega) factor and equals the
    // boundary-eliminated Schur complement of the absorbing form.
    const Mat t_ii = pick(sp.triple.form, sp.interior, sp.interior);
    const Mat t_ib = pick(sp.triple.form, sp.interior, sp.boundary);
    const Mat t_bi = pick(sp.triple.form, sp.boundary, sp.interior);
    const Mat t_bb = pick(sp.triple.form, sp.boundary, sp.boundary);
    const Mat schur = t_ii - t_ib * t_bb.partialPivLu().solve(t_bi);
    RVec mass(ni);
    for (Index i = 0; i < ni; ++i) mass(i) = sp.af.lumped_mass(sp.interior[i]);
    const Mat want = mass.cwiseInverse().cast<Complex>().asDiagonal() * schur;
    out.char_residual =
        (out.op.A - want).norm() / std::max(1.0, want.norm());
    return out;
  }

  // Domain characterization on the node basis: for x = j(u),
  // A x = (A_int u, psi) with B* psi - alpha Tr u the discrete normal
  // derivative sigma^-1 (S u)|Gamma.
  const Mat gb = sp.sigma.cast<Complex>().asDiagonal();
  const Mat b_star = gb.inverse() * p.B.adjoint() * gb;
  double worst = 0.0;
  for (Index k = 0; k < n; ++k) {
    const Vec u = Vec::Unit(n, k);
    const Vec x = sp.triple.jmap * u;
    const Vec y = out.op.A * x;
    // interior action: A_int u = mass^-1 (S u) at interior nodes
    const Vec su = sp.triple.form * u;
    double res = 0.0;
    for (Index i = 0; i < ni; ++i) {
      const Complex want = su(sp.interior[i]) / sp.af.lumped_mass(sp.interior[i]);
      res = std::max(res, std::abs(y(i) - want));
    }
    const Vec psi = y.segment(ni, nb);
    const Vec su_n = sp.af.stiffness * u;  // Neumann part only
    Vec normal(nb), lhs(nb);
    for (Index b = 0; b < nb; ++b)
      normal(b) = su_n(sp.boundary[b]) / sp.sigma(b);
    lhs = b_star * psi;
    for (Index b = 0; b < nb; ++b)
      lhs(b) -= p.alpha(b) * u(sp.boundary[b]);
    res = std::max(res, (lhs - normal).cwiseAbs().maxCoeff());
    worst = std::max(worst, res);
  }
  out.char_residual = worst;
  return out;
}

WentzellPositivity wentzell_positivity_check(const WentzellProblem& p,
                                             int samples, std::uint64_t seed) {
  WentzellSpaces sp = wentzell_spaces(p);
  const Index nb = static_cast<Index>(sp.boundary.size());
  Rng rng(seed);

  WentzellPositivity out;

  // lattice homomorphism: (B phi)^+ = B (phi^+) on sampled real phi
  out.lattice_homomorphism = true;
  if (p.B.imag().norm() > 0) out.lattice_homomorphism = false;
  const RMat b_real = p.B.real();
  std::vector<RVec> phis;
  for (Index i = 0; i < nb; ++i) phis.push_back(RVec::Unit(nb, i));
  for (Index i = 0; i < nb; ++i) phis.push_back(-RVec::Unit(nb, i));
  if (nb <= 10) {  // all sign patterns; catches mixing like B = [[1,1],[0,1]]
    for (unsigned mask = 0; mask < (1u << nb); ++mask) {
      RVec phi(nb);
      for (Index i = 0; i < nb; ++i) phi(i) = (mask >> i) & 1u ? 1.0 : -1.0;
      phis.push_back(phi);
    }
  }
  for (int k = 0; k < samples; ++k) {
    RVec phi(nb);
    for (Index i = 0; i < nb; ++i) phi(i) = rng.normal();
    phis.push_back(phi);
  }
  for (const RVec& phi : phis) {
    if (!out.lattice_homomorphism) break;
    const RVec lhs = (b_real * phi).cwiseMax(0.0);
    const RVec rhs = b_real * phi.cwiseMax(0.0);
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + phi.norm()))
      out.lattice_homomorphism = false;
  }

  // dynamic positivity of the product cone under the coupled semigroup
  OperatorBundle op = extract_operator(sp.triple);
  Propagator prop(op.A, sp.triple.H.gram_matrix());
  const Index dim_h = op.A.rows();
  out.dynamically_positive = true;
  std::vector<Vec> members;
  for (Index i = 0; i < dim_h; ++i) members.push_back(Vec::Unit(dim_h, i));
  for (int k = 0; k < samples; ++k) {
    Vec x(dim_h);
    for (Index i = 0; i < dim_h; ++i) x(i) = std::abs(rng.normal());
    members.push_back(x);
  }
  // The shortest time is scaled so the linear term of exp(-tA) dominates;
  // basis vectors then expose any positive off-diagonal of A.
  const double t0 = 1e-2 / std::max(1.0, op.A.cwiseAbs().maxCoeff());
  for (const Vec& x : members) {
    if (!out.dynamically_positive) break;
    for (double t : {t0, 10.0 * t0, 0.5}) {
      const Vec y = prop.apply(t, x);
      const double scale = std::max(1.0, x.norm());
      for (Index i = 0; i < dim_h; ++i)
        if (y(i).real() < -1e-10 * scale) out.dynamically_positive = false;
    }
  }
  return out;
}

WentzellH1Report wentzell_h1_realization(const WentzellProblem& p) {
  WentzellSpaces sp = wentzell_spaces(p);
  if (sp.decoupled)
    throw InvalidInput("the H1 realization needs an invertible B");
  OperatorBundle op = extract_operator(sp.triple);

  const Index n = sp.triple.V.dim;
  const Index ni = static_cast<Index>(sp.interior.size());
  const Index nb = static_cast<Index>(sp.boundary.size());

  // j is injective with j(V) = H here, so A1 = j^-1 A j on the node space.
  const Mat j = sp.triple.jmap;
  Eigen::PartialPivLU<Mat> jlu(j);
  WentzellH1Report rep;
  rep.A1 = jlu.solve(op.A * j);

  const Mat gb = sp.sigma.cast<Complex>().asDiagonal();
  const Mat b_star = gb.inverse() * p.B.adjoint() * gb;
  const Mat bsb = b_star * p.B;

  for (Index k = 0; k < n; ++k) {
    const Vec u = Vec::Unit(n, k);
    const Vec a1u = rep.A1 * u;
    const Vec su = sp.af.stiffness * u;
    for (Index i = 0; i < ni; ++i) {
      const Complex want = su(sp.interior[i]) / sp.af.lumped_mass(sp.interior[i]);
      rep.action_residual =
          std::max(rep.action_residual, std::abs(a1u(sp.interior[i]) - want));
    }
    // B* B Tr(A1 u) - alpha Tr u = discrete normal derivative of u
    Vec tr_a1u(nb), tr_u(nb), normal(nb);
    for (Index b = 0; b < nb; ++b) {
      tr_a1u(b) = a1u(sp.boundary[b]);
      tr_u(b) = u(sp.boundary[b]);
      normal(b) = su(sp.boundary[b]) / sp.sigma(b);
    }
    Vec lhs = bsb * tr_a1u;
    for (Index b = 0; b < nb; ++b) lhs(b) -= p.alpha(b) * tr_u(b);
    rep.boundary_residual =
        std::max(rep.boundary_residual, (lhs - normal).cwiseAbs().maxCoeff());
  }

  // Similar matrices share a spectrum; report the numerical gap.
  Eigen::ComplexEigenSolver<Mat> e1(rep.A1), e2(op.A);
  std::vector<Complex> s1, s2;
  for (Index i = 0; i < e1.eigenvalues().size(); ++i)
    s1.push_back(e1.eigenvalues()(i));
  for (Index i = 0; i < e2.eigenvalues().size(); ++i)
    s2.push_back(e2.eigenvalues()(i));
  double gap = 0.0;
  for (const Complex& a : s1) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& b : s2) best = std::min(best, std::abs(a - b));
    gap = std::max(gap, best);
  }
  rep.spectrum_gap = gap;
  return rep;
}

}  // namespace sectoria
