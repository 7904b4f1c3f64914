#include "sectoria/invariance.hpp"

#include <algorithm>
#include <cmath>

#include "sectoria/evolution.hpp"

namespace sectoria {

ConvexSetDescriptor ConvexSetDescriptor::real_subspace() {
  return {Kind::real_subspace, RVec()};
}
ConvexSetDescriptor ConvexSetDescriptor::positive_cone() {
  return {Kind::positive_cone, RVec()};
}
ConvexSetDescriptor ConvexSetDescriptor::upper_box(RVec bound) {
  return {Kind::upper_box, std::move(bound)};
}
ConvexSetDescriptor ConvexSetDescriptor::weighted_box(RVec inv_m) {
  return {Kind::weighted_box, std::move(inv_m)};
}

std::string ConvexSetDescriptor::name() const {
  switch (kind) {
    case Kind::real_subspace: return "real_subspace";
    case Kind::positive_cone: return "positive_cone";
    case Kind::upper_box: return "upper_box";
    case Kind::weighted_box: return "weighted_box";
  }
  return "?";
}

Vec project(const ConvexSetDescriptor& set, const Vec& x) {
  Vec p(x.size());
  switch (set.kind) {
    case ConvexSetDescriptor::Kind::real_subspace:
      for (Index i = 0; i < x.size(); ++i) p(i) = x(i).real();
      break;
    case ConvexSetDescriptor::Kind::positive_cone:
      for (Index i = 0; i < x.size(); ++i)
        p(i) = std::max(0.0, x(i).real());
      break;
    case ConvexSetDescriptor::Kind::upper_box:
    case ConvexSetDescriptor::Kind::weighted_box:
      if (set.bound.size() != x.size())
        throw InvalidInput("box bound has wrong dimension");
      for (Index i = 0; i < x.size(); ++i)
        p(i) = std::min(x(i).real(), set.bound(i));
      break;
  }
  return p;
}

Lift projection_lift(const ConvexSetDescriptor& set) {
  return [set](const Vec& u) { return project(set, u); };
}

CriterionReport criterion_check(const FormTriple& t,
                                const ConvexSetDescriptor& set,
                                const Lift& lift, int samples,
                                std::uint64_t seed) {
  t.validate();
  // Accretivity pre-shift: the criterion needs Re a >= 0.
  const SectorCertificate cert = sector_fit(t);
  const double tau = std::max(0.0, -cert.vertex);
  const Mat shifted = t.form + Complex(tau) * t.jmap_gram();

  const Mat& gh = t.H.gram_matrix();
  Rng rng(seed);

  std::vector<Vec> pool;
  const Index n = t.V.dim;
  for (Index i = 0; i < n; ++i) pool.push_back(Vec::Unit(n, i));
  pool.push_back(Vec::Ones(n));
  pool.push_back(-Vec::Ones(n));
  for (int k = 0; k < samples; ++k) pool.push_back(rng.cvector(n));

  CriterionReport report;
  report.samples = static_cast<int>(pool.size());
  report.worst_margin = std::numeric_limits<double>::infinity();
  const double lift_tol = 1e-9;
  for (const Vec& u : pool) {
    const Vec w = lift(u);
    const Vec pj = project(set, t.j(u));
    const double mismatch = std::sqrt(std::max(
        0.0, Complex((pj - t.j(w)).dot(gh * (pj - t.j(w)))).real()));
    report.lift_residual = std::max(report.lift_residual, mismatch);
    if (mismatch > lift_tol * std::max(1.0, std::sqrt(t.H.norm2(pj))))
      throw LiftMismatch("P j(u) != j(lift(u)) on a sample", u);
    const Vec d = u - w;
    const double margin = Complex(d.dot(shifted * w)).real();
    report.worst_margin = std::min(report.worst_margin, margin);
  }
  report.pass = report.worst_margin >= -1e-10;
  return report;
}

DynamicReport dynamic_invariance_check(const Mat& A,
                                       const ConvexSetDescriptor& set,
                                       const std::vector<double>& t_grid,
                                       int samples, std::uint64_t seed,
                                       double tolerance) {
  Rng rng(seed);
  const Index n = A.rows();
  Propagator prop(A);

  std::vector<Vec> members;
  for (Index i = 0; i < n; ++i)
    members.push_back(project(set, Vec::Unit(n, i)));
  members.push_back(project(set, Vec::Ones(n)));
  for (int k = 0; k < samples; ++k)
    members.push_back(project(set, 3.0 * rng.cvector(n)));

  DynamicReport report;
  for (const Vec& x : members) {
    for (double t : t_grid) {
      const Vec y = prop.apply(t, x);
      const double dist = (y - project(set, y)).norm();
      report.worst_distance = std::max(report.worst_distance, dist);
    }
  }
  report.pass = report.worst_distance <= tolerance;
  return report;
}

namespace {

bool sup_contractive_sampled(const Mat& A, Rng& rng, int samples) {
  const Index n = A.rows();
  Propagator prop(A);
  const std::vector<double> times = {0.01, 0.1, 1.0};
  std::vector<Vec> pool;
  for (Index i = 0; i < n; ++i) pool.push_back(Vec::Unit(n, i));
  pool.push_back(Vec::Ones(n));
  for (int k = 0; k < samples; ++k) {
    Vec u(n);
    for (Index i = 0; i < n; ++i) u(i) = rng.uniform(-1.0, 1.0);
    pool.push_back(u);
  }
  for (const Vec& u : pool) {
    const double nrm = u.cwiseAbs().maxCoeff();
    for (double t : times) {
      if (prop.apply(t, u).cwiseAbs().maxCoeff() > nrm * (1.0 + 1e-9))
        return false;
    }
  }
  return true;
}

}  // namespace

MarkovFlags markov_suite(const Mat& A, const RVec& weights, int samples,
                         std::uint64_t seed) {
  if (weights.size() != A.rows())
    throw InvalidInput("weights dimension mismatch");
  if (weights.minCoeff() <= 0.0)
    throw NonPositiveWeight("markov_suite requires positive weights");
  Rng rng(seed);
  const Index n = A.rows();
  Propagator prop(A);
  const std::vector<double> times = {0.01, 0.1, 1.0};

  MarkovFlags flags;

  // real: real data stays real
  flags.real = true;
  for (int k = 0; k < samples && flags.real; ++k) {
    Vec u(n);
    for (Index i = 0; i < n; ++i) u(i) = rng.normal();
    const double scale = u.norm();
    for (double t : times) {
      if (prop.apply(t, u).imag().cwiseAbs().maxCoeff() > 1e-12 * scale)
        flags.real = false;
    }
  }

  // positive: the positive cone is preserved
  flags.positive = true;
  {
    std::vector<Vec> pool;
    for (Index i = 0; i < n; ++i) pool.push_back(Vec::Unit(n, i));
    for (int k = 0; k < samples; ++k) {
      Vec u(n);
      for (Index i = 0; i < n; ++i) u(i) = std::abs(rng.normal());
      pool.push_back(u);
    }
    for (const Vec& u : pool) {
      const double scale = std::max(1.0, u.norm());
      for (double t : times) {
        Vec y = prop.apply(t, u);
        for (Index i = 0; i < n; ++i)
          if (y(i).real() < -1e-11 * scale) flags.positive = false;
      }
    }
  }

  flags.sup_contractive = sup_contractive_sampled(A, rng, samples);

  // L1 contractivity by duality: the weighted-Gram adjoint semigroup must be
  // sup-contractive.
  const Mat g = weights.cast<Complex>().asDiagonal();
  const Mat adj = g.inverse() * A.adjoint() * g;
  flags.l1_contractive = sup_contractive_sampled(adj, rng, samples);

  return flags;
}

}  // namespace sectoria
