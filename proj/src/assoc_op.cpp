#include "sectoria/assoc_op.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

namespace sectoria {

namespace detail {

double lax_milgram_margin(const FormTriple& t, double lambda) {
  const Mat b = hermitian_part(t.form) + lambda * t.jmap_gram();
  return min_eig_pencil(b, t.V.gram_matrix());
}

}  // namespace detail

namespace {

// Solve (form + lambda W) u = rhs with a condition estimate; the dense LU
// with partial pivoting is the workhorse for every extraction.
Mat shifted_solve(const FormTriple& t, double lambda, const Mat& rhs,
                  double* cond_out = nullptr) {
  const Mat b = t.form + lambda * t.jmap_gram();
  Eigen::PartialPivLU<Mat> lu(b);
  const double cond = b.norm() * lu.inverse().norm();
  if (cond_out) *cond_out = cond;
  if (!std::isfinite(cond) || cond > 1e14)
    throw SingularSolve("shifted form matrix numerically singular, cond ~ " +
                        std::to_string(cond));
  return lu.solve(rhs);
}

}  // namespace

Mat resolvent(const FormTriple& t, double lambda) {
  t.validate();
  const double scale =
      std::max({t.form.norm(), t.jmap_gram().norm(), 1.0});
  const double margin = detail::lax_milgram_margin(t, lambda);
  if (margin <= 1e-12 * scale)
    throw ShiftTooSmall("Lax-Milgram coercivity fails at lambda = " +
                        std::to_string(lambda));
  const Mat rhs = t.jmap.adjoint() * t.H.gram_matrix();
  return t.jmap * shifted_solve(t, lambda, rhs);
}

namespace {

OperatorBundle extract_with_cert(const FormTriple& t, SectorCertificate cert,
                                 double omega) {
  const double lambda = omega + 1.0;
  const Mat r1 = resolvent(t, lambda);
  Eigen::PartialPivLU<Mat> lu(r1);
  const double cond = r1.norm() * lu.inverse().norm();
  if (!std::isfinite(cond) || cond > 1e14)
    throw SingularSolve("resolvent not invertible (is j(V) dense?)");
  const Index n = t.H.dim;
  Mat A = lu.solve(Mat::Identity(n, n)) - lambda * Mat::Identity(n, n);

  // Extraction must not depend on the shift; cross-check at omega + 2.
  const Mat r2 = resolvent(t, lambda + 1.0);
  const Mat A2 = r2.partialPivLu().solve(Mat::Identity(n, n)) -
                 (lambda + 1.0) * Mat::Identity(n, n);
  const double diff = (A - A2).norm() / std::max(1.0, A.norm());
  if (diff > 1e-9)
    throw SingularSolve("extraction is shift-dependent, relative gap " +
                        std::to_string(diff));

  OperatorBundle out;
  out.A = std::move(A);
  out.lambda_ref = lambda;
  out.decomposition = kernel_and_Va(t);
  out.cert = std::move(cert);
  out.source = t;
  return out;
}

}  // namespace

OperatorBundle extract_operator(const FormTriple& t) {
  t.validate();
  if (!t.j_range_dense())
    throw InvalidInput("extract_operator requires j(V) dense in H");
  auto [omega, mu] = check_j_elliptic(t);
  SectorCertificate cert = sector_fit(t);
  cert.omega = omega;
  cert.mu = mu;
  return extract_with_cert(t, std::move(cert), omega);
}

OperatorBundle extract_operator_Va(const FormTriple& t) {
  t.validate();
  DecompositionBundle dec = kernel_and_Va(t);
  if (dec.ker_basis.cols() + dec.va_basis.cols() != t.V.dim ||
      !dec.direct_sum) {
    throw SumDecompositionFails(
        "V(a) + ker j does not span V (dim " +
        std::to_string(dec.ker_basis.cols() + dec.va_basis.cols()) + " of " +
        std::to_string(t.V.dim) + ")");
  }

  // Restrict (a, j) to V(a); ellipticity is only required there.
  const Mat& phi = dec.va_basis;
  FormTriple restricted;
  restricted.V.dim = phi.cols();
  restricted.V.gram = phi.adjoint() * t.V.gram_matrix() * phi;
  restricted.H = t.H;
  restricted.form = phi.adjoint() * t.form * phi;
  restricted.jmap = t.jmap * phi;

  if (!restricted.j_range_dense())
    throw SumDecompositionFails("j(V(a)) is not dense in H");
  std::pair<double, double> om;
  try {
    om = check_j_elliptic(restricted);
  } catch (const NotElliptic& e) {
    throw NotEllipticOnVa(std::string("ellipticity fails on V(a): ") +
                          e.what(), e.witness());
  }
  SectorCertificate cert = sector_fit(restricted);
  cert.omega = om.first;
  cert.mu = om.second;
  OperatorBundle out = extract_with_cert(restricted, std::move(cert), om.first);
  // Report the decomposition of the full space, not the restriction.
  out.decomposition = std::move(dec);
  out.source = t;
  return out;
}

OperatorBundle extract_incomplete(const SeminormedFormData& s) {
  QuotientCompletion qc = quotient_completion(s);
  if (!qc.triple.j_range_dense())
    throw InvalidInput("j(D(a)) is not dense in H");
  return extract_operator(qc.triple);
}

Mat OperatorBundle::resolvent_at(double lambda) const {
  const Index n = A.rows();
  const Mat m = lambda * Mat::Identity(n, n) + A;
  Eigen::PartialPivLU<Mat> lu(m);
  const double cond = m.norm() * lu.inverse().norm();
  if (!std::isfinite(cond) || cond > 1e14)
    throw SingularSolve("lambda I + A numerically singular");
  return lu.solve(Mat::Identity(n, n));
}

Mat adjoint_operator(const FormTriple& t) {
  FormTriple star = t;
  star.form = t.form.adjoint();  // a*(u,v) = conj(a(v,u))
  return extract_operator(star).A;
}

namespace {

// T-block machinery from the vertex-normalized decomposition: with the
// h-inner product on V, T solves k(u,v) = h(Tu,v) and the constant is
// C = ||(I + i T11)^-1 T12||^2 + 1.
double comparison_constant(const FormTriple& shifted) {
  const Mat h = hermitian_part(shifted.form);
  const Mat k = skew_part(shifted.form);

  const Mat kernel = null_space(shifted.jmap);
  if (kernel.cols() == 0) return 1.0;

  const Mat k1 = gram_orthonormalize(kernel, h);
  // h-orthogonal complement of ker j: null of K1^H h.
  const Mat p2 =
      gram_orthonormalize(null_space(k1.adjoint() * h, h.norm()), h);

  const Mat t11 = k1.adjoint() * k * k1;
  const Mat t12 = k1.adjoint() * k * p2;
  const Mat m = (Mat::Identity(t11.rows(), t11.cols()) + Complex(0, 1) * t11)
                    .partialPivLu()
                    .solve(t12);
  Eigen::BDCSVD<Mat> svd(m);
  const double nrm = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return nrm * nrm + 1.0;
}

// Classical form of (form, j) on H transported along j|V(a); requires the
// decomposition to hold and j|V(a) to be a bijection onto H.
Mat transport_to_H(const FormTriple& t) {
  DecompositionBundle dec = kernel_and_Va(t);
  const Mat& phi = dec.va_basis;
  const Mat m = t.jmap * phi;
  if (m.rows() != m.cols())
    throw SumDecompositionFails("j(V(a)) has wrong dimension for transport");
  Eigen::PartialPivLU<Mat> lu(m);
  const Mat minv = lu.inverse();
  return minv.adjoint() * (phi.adjoint() * t.form * phi) * minv;
}

}  // namespace

ClassicalFormResult classical_form(const FormTriple& t) {
  t.validate();
  auto [omega, mu] = check_j_elliptic(t);

  ClassicalFormResult out;
  out.a_c = transport_to_H(t);

  FormTriple real_part = t;
  real_part.form = hermitian_part(t.form);
  out.h_c = transport_to_H(real_part);

  // Normalize to omega <= -1 before reading off the T-block constant.
  out.shift = omega + 1.0;
  FormTriple shifted = t;
  shifted.form = t.form + Complex(out.shift) * t.jmap_gram();
  out.C = comparison_constant(shifted);
  return out;
}

Mat regular_part(const SeminormedFormData& s) {
  QuotientCompletion qc = quotient_completion(s);
  if (!qc.triple.j_range_dense())
    throw InvalidInput("j(D(a)) is not dense in H");
  return classical_form(qc.triple).a_c;
}

}  // namespace sectoria
