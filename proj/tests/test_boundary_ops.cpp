#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sectoria/boundary_ops.hpp"
#include "sectoria/invariance.hpp"
#include "sectoria/evolution.hpp"

using namespace sectoria;

namespace {

WentzellProblem interval_wentzell(int cells, Vec alpha, Mat B) {
  WentzellProblem p;
  p.grid = GridProblem::interval(1.0, cells, 1.0);
  p.alpha = std::move(alpha);
  p.B = std::move(B);
  return p;
}

}  // namespace

TEST_CASE("dtn_oracle_interval: closed forms and refusals") {
  const Mat d0 = dtn_oracle_interval(0.0, 2.0);
  CHECK(std::abs(d0(0, 0) - Complex(0.5)) <= 1e-15);
  CHECK(std::abs(d0(0, 1) + Complex(0.5)) <= 1e-15);
  // lambda -> 0 continuity
  const Mat deps = dtn_oracle_interval(1e-10, 2.0);
  CHECK((deps - d0).norm() <= 1e-8);
  // negative lambda through the hyperbolic branch
  const Mat dneg = dtn_oracle_interval(-4.0, 1.0);
  CHECK(std::abs(dneg(0, 0) - Complex(2.0 / std::tanh(2.0))) <= 1e-12);
  CHECK(std::abs(dneg(0, 1) + Complex(2.0 / std::sinh(2.0))) <= 1e-12);
  CHECK_THROWS_AS(dtn_oracle_interval(M_PI * M_PI, 1.0), OnDirichletSpectrum);
}

TEST_CASE("dtn_assemble: harmonic case matches the analytic operator") {
  DtnProblem p{GridProblem::interval(1.0, 256, 1.0), 0.0};
  const DtnResult res = dtn_assemble(p);
  const Mat oracle = dtn_oracle_interval(0.0, 1.0);
  CHECK((res.op.A - oracle).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK(res.cross_check <= 1e-9);
  // constants are harmonic with zero flux
  const Vec phi = Vec::Ones(2);
  CHECK((res.op.A * phi).norm() <= 1e-10);
}

TEST_CASE("dtn_assemble: lambda = pi^2/4 against the ODE closed form") {
  DtnProblem p{GridProblem::interval(1.0, 256, 1.0), M_PI * M_PI / 4.0};
  const DtnResult res = dtn_assemble(p);
  const Mat oracle = dtn_oracle_interval(M_PI * M_PI / 4.0, 1.0);
  CHECK(std::abs(oracle(0, 0)) <= 1e-12);  // cos(pi/2) = 0
  CHECK((res.op.A - oracle).cwiseAbs().maxCoeff() <= 1e-2);
  CHECK(res.cross_check <= 1e-9);
}

TEST_CASE("dtn_assemble: refuses lambda on the interior spectrum") {
  const GridProblem grid = GridProblem::interval(1.0, 64, 1.0);
  const RVec spec = interior_dirichlet_eigenvalues(grid);
  DtnProblem p{grid, spec(0)};
  CHECK_THROWS_AS(dtn_assemble(p), LambdaOnSpectrum);
}

TEST_CASE("dtn_assemble: Hermitian with real eigenvalues for real lambda") {
  for (double lambda : {-3.0, 0.0, 5.0}) {
    DtnProblem p{GridProblem::interval(1.0, 64, 1.0), lambda};
    const DtnResult res = dtn_assemble(p);
    const Mat ga = Mat(res.sigma.cast<Complex>().asDiagonal()) * res.op.A;
    CHECK((ga - ga.adjoint()).norm() <= 1e-9 * std::max(1.0, ga.norm()));
    Eigen::ComplexEigenSolver<Mat> es(res.op.A);
    for (Index i = 0; i < es.eigenvalues().size(); ++i)
      CHECK(std::abs(es.eigenvalues()(i).imag()) <= 1e-9);
  }
}

TEST_CASE("dtn monotonicity in lambda (logged, not asserted)") {
  // entries should decrease with lambda below the first Dirichlet
  // eigenvalue; exploratory per the module notes
  std::vector<double> diagonals;
  for (double lambda : {-2.0, 0.0, 2.0}) {
    DtnProblem p{GridProblem::interval(1.0, 64, 1.0), lambda};
    diagonals.push_back(dtn_assemble(p).op.A(0, 0).real());
  }
  MESSAGE("DtN diagonal vs lambda: ", diagonals[0], " ", diagonals[1], " ",
          diagonals[2]);
}

TEST_CASE("dtn_assemble: 2D square cross-checks the Schur route") {
  DtnProblem p{GridProblem::square(1.0, 1.0, 12, 12, 1.0), 0.0};
  const DtnResult res = dtn_assemble(p);
  CHECK(res.cross_check <= 1e-9);
  const Vec ones = Vec::Ones(res.op.A.rows());
  CHECK((res.op.A * ones).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("wentzell_assemble: B = I, alpha = 0 satisfies the Green identity") {
  WentzellProblem p = interval_wentzell(16, Vec::Zero(2), Mat::Identity(2, 2));
  const WentzellResult r = wentzell_assemble(p);
  CHECK(r.char_residual <= 1e-9);

  // direct Green-identity oracle on a random node function: the image of
  // (u, u|Gamma) must be (interior -Delta_h u, discrete normal derivative)
  Rng rng(269);
  const Vec u = rng.cvector(17);
  const AssembledForm af = assemble_form(p.grid);
  const Vec x = [&] {
    Vec v(15 + 2);
    for (int i = 0; i < 15; ++i) v(i) = u(i + 1);
    v(15) = u(0);
    v(16) = u(16);
    return v;
  }();
  const Vec y = r.op.A * x;
  const Vec su = af.stiffness * u;
  const double h = 1.0 / 16;
  for (int i = 0; i < 15; ++i)
    CHECK(std::abs(y(i) - su(i + 1) / h) <= 1e-8 * (1 + su.norm()));
  CHECK(std::abs(y(15) - su(0)) <= 1e-8 * (1 + su.norm()));   // sigma = 1
  CHECK(std::abs(y(16) - su(16)) <= 1e-8 * (1 + su.norm()));
}

TEST_CASE("wentzell_assemble: B = 0 decouples onto the L2 factor") {
  WentzellProblem p = interval_wentzell(16, Vec::Constant(2, 0.5),
                                        Mat::Zero(2, 2));
  const WentzellResult r = wentzell_assemble(p);
  CHECK(r.op.A.rows() == 15);
  CHECK(r.char_residual <= 1e-9);
  // negative absorption is refused
  WentzellProblem bad = interval_wentzell(16, Vec::Constant(2, -0.5),
                                          Mat::Zero(2, 2));
  CHECK_THROWS_AS(wentzell_assemble(bad), CertificateFails);
}

TEST_CASE("wentzell_assemble: scalar beta certificate arithmetic") {
  // omega |beta|^2 + Re alpha >= 0 with beta = 1, alpha = -0.5, omega = 1
  WentzellProblem p = interval_wentzell(8, Vec::Constant(2, Complex(-0.5, 0)),
                                        Mat::Identity(2, 2));
  p.omega_cert = 1.0;
  const WentzellResult r = wentzell_assemble(p);
  CHECK(r.char_residual <= 1e-9);
}

TEST_CASE("wentzell positivity: diagonal positive B") {
  Mat b = Mat::Zero(2, 2);
  b(0, 0) = 2.0;
  b(1, 1) = 0.7;
  WentzellProblem p = interval_wentzell(12, Vec::Zero(2), b);
  const WentzellPositivity pos = wentzell_positivity_check(p, 30, 11);
  CHECK(pos.lattice_homomorphism);
  CHECK(pos.dynamically_positive);
}

TEST_CASE("wentzell positivity: mixing B fails both ways") {
  Mat b(2, 2);
  b << 1, 1, 0, 1;  // (B phi)+ != B(phi+) at phi = (1, -1)
  WentzellProblem p = interval_wentzell(12, Vec::Zero(2), b);
  const WentzellPositivity pos = wentzell_positivity_check(p, 30, 12);
  CHECK(!pos.lattice_homomorphism);
  CHECK(!pos.dynamically_positive);
  CHECK(pos.agree());
}

TEST_CASE("wentzell: sup-norm boundedness for B = I, alpha >= 0") {
  WentzellProblem p = interval_wentzell(16, Vec::Constant(2, 0.3),
                                        Mat::Identity(2, 2));
  WentzellResult r = wentzell_assemble(p);
  Propagator prop(r.op.A, r.op.source.H.gram_matrix());
  Rng rng(271);
  for (int k = 0; k < 20; ++k) {
    Vec x(r.op.A.rows());
    for (Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1.0, 1.0);
    const double nrm = x.cwiseAbs().maxCoeff();
    for (double t : {0.01, 0.1, 1.0})
      CHECK(prop.apply(t, x).cwiseAbs().maxCoeff() <= nrm * (1.0 + 1e-9));
  }
}

TEST_CASE("wentzell: symmetric data gives a self-adjoint coupled operator") {
  WentzellProblem p = interval_wentzell(12, Vec::Constant(2, 0.4),
                                        Mat::Identity(2, 2) * 1.3);
  const WentzellResult r = wentzell_assemble(p);
  const Mat gh = r.op.source.H.gram_matrix();
  const Mat ga = gh * r.op.A;
  CHECK((ga - ga.adjoint()).norm() <= 1e-10 * ga.norm());
}

TEST_CASE("wentzell_h1_realization: boundary identity and spectrum") {
  const double beta = 0.8;
  WentzellProblem p = interval_wentzell(16, Vec::Constant(2, Complex(0.3, 0)),
                                        beta * Mat::Identity(2, 2));
  const WentzellH1Report rep = wentzell_h1_realization(p);
  CHECK(rep.action_residual <= 1e-8);
  CHECK(rep.boundary_residual <= 1e-8);
  CHECK(rep.spectrum_gap <= 1e-7);

  // scalar-beta form of the flux balance: for every node function,
  // normal derivative + |beta|^2 Tr(A1 u) - alpha Tr u ... = 0 is what
  // boundary_residual already measured; spot-check one vector explicitly.
  const AssembledForm af = assemble_form(p.grid);
  Rng rng(277);
  const Vec u = rng.cvector(17);
  const Vec a1u = rep.A1 * u;
  const Vec su = af.stiffness * u;
  for (int b : {0, 16}) {
    const Complex normal = su(b);  // sigma = 1 point masses
    const Complex balance =
        beta * beta * a1u(b) - Complex(0.3) * u(b) - normal;
    CHECK(std::abs(balance) <= 1e-8 * (1 + su.norm()));
  }
}

TEST_CASE("wentzell_h1_realization: alpha = 0, B = I consistency") {
  WentzellProblem p = interval_wentzell(16, Vec::Zero(2), Mat::Identity(2, 2));
  const WentzellH1Report rep = wentzell_h1_realization(p);
  CHECK(rep.action_residual <= 1e-9);
  CHECK(rep.boundary_residual <= 1e-9);
}

TEST_CASE("dtn semigroup positivity and sup contraction for lambda <= 0") {
  // dynamic checks asserted; the criterion-side margin is only logged
  // because no lattice lift is available for the trace map
  for (double lambda : {0.0, -2.0}) {
    DtnProblem p{GridProblem::square(1.0, 1.0, 8, 8, 1.0), lambda};
    const DtnResult res = dtn_assemble(p);
    const auto dyn = dynamic_invariance_check(
        res.op.A, ConvexSetDescriptor::positive_cone(), {0.01, 0.1, 1.0}, 40,
        13, 1e-9);
    CHECK(dyn.pass);
    Propagator prop(res.op.A, res.op.source.H.gram_matrix());
    Rng rng(283);
    for (int k = 0; k < 20; ++k) {
      Vec x(res.op.A.rows());
      for (Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1.0, 1.0);
      const double nrm = x.cwiseAbs().maxCoeff();
      for (double t : {0.01, 0.1, 1.0})
        CHECK(prop.apply(t, x).cwiseAbs().maxCoeff() <= nrm * (1 + 1e-9));
    }
    const auto crit = criterion_check(
        res.op.source, ConvexSetDescriptor::positive_cone(),
        [&](const Vec& u) {
          // no exhibited lift for the trace map; log the projection route
          return Vec(res.op.decomposition.va_basis *
                     (res.op.source.jmap * res.op.decomposition.va_basis)
                         .partialPivLu()
                         .solve(project(ConvexSetDescriptor::positive_cone(),
                                        res.op.source.jmap * u)));
        },
        100, 14);
    MESSAGE("DtN lambda=", lambda,
            " criterion-side margin (logged): ", crit.worst_margin);
  }
}

TEST_CASE("wentzell on a 2D square: characterization and self-adjointness") {
  WentzellProblem p;
  p.grid = GridProblem::square(1.0, 1.0, 6, 6, 1.0);
  const int nb = static_cast<int>(p.grid.boundary_nodes().size());
  p.alpha = Vec::Constant(nb, 0.25);
  Mat b = Mat::Zero(nb, nb);
  for (int i = 0; i < nb; ++i) b(i, i) = 1.0 + 0.1 * (i % 3);
  p.B = b;
  const WentzellResult res = wentzell_assemble(p);
  CHECK(res.char_residual <= 1e-9);
  const Mat gh = res.op.source.H.gram_matrix();
  const Mat ga = gh * res.op.A;
  CHECK((ga - ga.adjoint()).norm() <= 1e-10 * ga.norm());
  const WentzellPositivity pos = wentzell_positivity_check(p, 20, 15);
  CHECK(pos.lattice_homomorphism);
  CHECK(pos.dynamically_positive);
}
