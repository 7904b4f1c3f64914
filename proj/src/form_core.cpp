#include "sectoria/form_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace sectoria {

// --- HilbertSpaceSpec -----------------------------------------------------

HilbertSpaceSpec HilbertSpaceSpec::euclidean(Index n) {
  HilbertSpaceSpec s;
  s.dim = n;
  return s;
}

HilbertSpaceSpec HilbertSpaceSpec::weighted(const RVec& w) {
  HilbertSpaceSpec s;
  s.dim = w.size();
  s.gram = w.cast<Complex>().asDiagonal();
  return s;
}

const Mat& HilbertSpaceSpec::gram_matrix() const {
  if (gram.size() != 0) return gram;
  if (identity_cache_.rows() != dim) identity_cache_ = Mat::Identity(dim, dim);
  return identity_cache_;
}

Complex HilbertSpaceSpec::inner(const Vec& x, const Vec& y) const {
  if (gram.size() == 0) return y.dot(x);  // Eigen's dot conjugates y
  return y.dot(gram * x);
}

double HilbertSpaceSpec::norm2(const Vec& x) const {
  return std::max(0.0, inner(x, x).real());
}

double HilbertSpaceSpec::norm(const Vec& x) const {
  return std::sqrt(norm2(x));
}

void HilbertSpaceSpec::validate() const {
  if (dim <= 0) throw InvalidInput("space dimension must be positive");
  if (gram.size() == 0) return;
  if (gram.rows() != dim || gram.cols() != dim)
    throw InvalidInput("gram matrix shape does not match dim");
  const double scale = std::max(1.0, gram.norm());
  if ((gram - gram.adjoint()).norm() > hermitian_tol * scale)
    throw InvalidInput("gram matrix is not Hermitian within 1e-12");
  if (min_eig_hermitian(gram) <= 0.0)
    throw InvalidInput("gram matrix is not positive definite");
}

// --- FormTriple -------------------------------------------------------------

void FormTriple::validate() const {
  V.validate();
  H.validate();
  if (form.rows() != V.dim || form.cols() != V.dim)
    throw InvalidInput("form matrix must be dim(V) x dim(V)");
  if (jmap.rows() != H.dim || jmap.cols() != V.dim)
    throw InvalidInput("jmap must be dim(H) x dim(V)");
}

Complex FormTriple::a(const Vec& u, const Vec& v) const {
  return v.dot(form * u);
}

// |a(u,v)| = |v^H form u| <= ||G^-1/2 form G^-1/2|| ||u||_V ||v||_V, so the
// constant is the top singular value of G^-1/2 form G^-1/2.
double FormTriple::continuity_constant() const {
  const Mat gi = hermitian_inv_sqrt(V.gram_matrix());
  Eigen::BDCSVD<Mat> svd(gi * form * gi);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

Mat FormTriple::jmap_gram() const {
  return jmap.adjoint() * H.gram_matrix() * jmap;
}

bool FormTriple::j_range_dense() const {
  if (jmap.rows() == 0) return true;
  Eigen::BDCSVD<Mat> svd(jmap);
  const auto& sv = svd.singularValues();
  if (sv.size() < jmap.rows()) return false;
  return sv(jmap.rows() - 1) > sv(0) * rank_tol;
}

// --- sector_fit ------------------------------------------------------------

namespace {

// Largest value above which "PSD within tolerance" fails; eigenvalues are
// compared against -psd_slack * scale. Coercivity constants must clear the
// same floor from above to count as strictly positive.
constexpr double psd_slack = 1e-12;
constexpr double positivity_floor = 1e-12;

bool psd_at(const Mat& hm, const Mat& w, double gamma, double scale) {
  return min_eig_hermitian(hm - gamma * w) >= -psd_slack * scale;
}

// Pencil regularization only when the shifted real part is singular;
// nonsingular pencils keep exact ratios (tan theta = 0.5 stays 0.5).
Mat regularized_pencil_base(const Mat& hm, const Mat& w, double gamma) {
  Mat b = hm - gamma * w;
  const double scale = std::max(hm.norm(), 1e-300);
  if (min_eig_hermitian(b) <= 1e-12 * scale)
    b += 1e-12 * scale * Mat::Identity(hm.rows(), hm.cols());
  return b;
}

double tan_theta_at(const Mat& hm, const Mat& w, const Mat& k, double gamma) {
  if (k.norm() <= 1e-300) return 0.0;
  return max_abs_eig_pencil(k, regularized_pencil_base(hm, w, gamma));
}

}  // namespace

SectorCertificate sector_fit(const FormTriple& t) {
  t.validate();
  const Mat hm = hermitian_part(t.form);
  const Mat k = skew_part(t.form);
  const Mat w = t.jmap_gram();
  const double scale = std::max({hm.norm(), w.norm(), 1.0});

  // Bracket the largest gamma with hm - gamma w >= 0. Sectoriality fails
  // outright when even a hugely negative vertex cannot make the real part
  // nonnegative (e.g. Re a(u) < 0 somewhere on ker j).
  double lo = 0.0;
  if (!psd_at(hm, w, lo, scale)) {
    bool found = false;
    double step = 1.0;
    for (int i = 0; i < 80 && !found; ++i, step *= 2.0) {
      lo = -step * scale;
      found = psd_at(hm, w, lo, scale);
    }
    if (!found) {
      Eigen::SelfAdjointEigenSolver<Mat> es(hm);
      throw NotSectorial(
          "no vertex makes the real part nonnegative (Re a < 0 on ker j)",
          es.eigenvectors().col(0));
    }
  }
  double hi = std::max(1.0, std::abs(lo)) ;
  while (psd_at(hm, w, hi, scale)) {
    hi *= 2.0;
    if (hi > 1e30 * scale) break;  // real part stays PSD for any vertex
  }
  // Bisection to 1e-10 absolute.
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (psd_at(hm, w, mid, scale) ? lo : hi) = mid;
  }
  const double gamma_max = lo;

  // Canonical vertex: 0 when feasible, else the PSD boundary; lower it
  // further while the semi-angle is degenerate (the boundary kernel can
  // carry skew mass).
  constexpr double tan_cap = 1e8;
  double gamma = std::min(0.0, gamma_max);
  double tt = tan_theta_at(hm, w, k, gamma);
  if (tt > tan_cap) {
    bool ok = false;
    double step = std::max(1.0, std::abs(gamma));
    for (int i = 0; i < 80; ++i, step *= 2.0) {
      const double g = gamma - step;
      const double cand = tan_theta_at(hm, w, k, g);
      if (cand <= tan_cap) {
        gamma = g;
        tt = cand;
        ok = true;
        break;
      }
    }
    if (!ok) {
      // The degeneracy persists for every vertex: skew mass on directions
      // where the shifted real part vanishes identically.
      Eigen::SelfAdjointEigenSolver<Mat> es(k);
      const auto& ev = es.eigenvalues();
      const Index worst =
          std::abs(ev(0)) > std::abs(ev(ev.size() - 1)) ? 0 : ev.size() - 1;
      throw NotSectorial("no semi-angle below pi/2 exists for any vertex",
                         es.eigenvectors().col(worst));
    }
  }

  SectorCertificate cert;
  cert.vertex = gamma;
  cert.tan_theta = std::max(0.0, tt);
  cert.semi_angle = std::atan(cert.tan_theta);

  // Witnesses: the pencil eigenvector attaining tan(theta), and the
  // eigenvector of hm - gamma_max w closest to the sector boundary.
  {
    const Mat b = regularized_pencil_base(hm, w, gamma);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(k, b);
    const auto& ev = ges.eigenvalues();
    if (ev.size() > 0) {
      const Index worst =
          std::abs(ev(0)) > std::abs(ev(ev.size() - 1)) ? 0 : ev.size() - 1;
      cert.witnesses.push_back(ges.eigenvectors().col(worst).normalized());
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(hm - gamma_max * w);
    cert.witnesses.push_back(es.eigenvectors().col(0));
  }
  return cert;
}

// --- check_j_elliptic --------------------------------------------------------

std::pair<double, double> check_j_elliptic(const FormTriple& t) {
  t.validate();
  const Mat hm = hermitian_part(t.form);
  const Mat w = t.jmap_gram();
  const Mat& gv = t.V.gram_matrix();
  const double scale = std::max({hm.norm(), w.norm(), 1.0});

  // Necessary: Re a positive definite on ker j (omega cannot help there).
  const Mat kernel = null_space(t.jmap);
  if (kernel.cols() > 0) {
    const Mat hk = kernel.adjoint() * hm * kernel;
    const Mat gk = kernel.adjoint() * gv * kernel;
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(hermitian_part(hk),
                                                     hermitian_part(gk));
    const double mu0 = es.eigenvalues()(0);
    if (mu0 <= positivity_floor * scale) {
      Vec witness = kernel * es.eigenvectors().col(0);
      throw NotElliptic("Re a is not positive definite on ker j", witness);
    }
  }

  // Doubling sweep on omega; mu(omega) is nondecreasing and tends to the
  // ker-j floor, so the first strictly positive value wins. Coercive forms
  // are swept downward instead, so the reported omega is as small as the
  // doubling grid allows (omega <= -1 certificates matter downstream).
  auto mu_at = [&](double omega) { return min_eig_pencil(hm + omega * w, gv); };
  double omega = 0.0;
  double mu = mu_at(omega);
  if (mu > positivity_floor * scale) {
    if (w.norm() > 1e-14 * scale) {  // with j = 0 omega buys nothing
      for (double probe = -1.0; probe > -1e8 * scale; probe *= 2.0) {
        const double mu_probe = mu_at(probe);
        if (mu_probe <= positivity_floor * scale) break;
        omega = probe;
        mu = mu_probe;
      }
    }
    return {omega, mu};
  }
  omega = 1.0;
  for (int i = 0; i <= 80; ++i, omega *= 2.0) {
    mu = mu_at(omega);
    if (mu > positivity_floor * scale) return {omega, mu};
  }
  throw NotElliptic("omega sweep exhausted without positive coercivity");
}

SectorCertificate certify(const FormTriple& t) {
  SectorCertificate cert = sector_fit(t);
  try {
    auto [omega, mu] = check_j_elliptic(t);
    cert.omega = omega;
    cert.mu = mu;
  } catch (const NotElliptic&) {
    // Sectorial but not j-elliptic; omega/mu stay absent.
  }
  return cert;
}

// --- kernel_and_Va -----------------------------------------------------------

DecompositionBundle kernel_and_Va(const FormTriple& t) {
  t.validate();
  DecompositionBundle out;
  const Mat kernel_raw = null_space(t.jmap);
  out.ker_basis = gram_orthonormalize(kernel_raw, t.V.gram_matrix());

  if (out.ker_basis.cols() == 0) {
    out.va_basis = Mat::Identity(t.V.dim, t.V.dim);
    out.direct_sum = true;
    out.joint_condition = 1.0;
    return out;
  }
  // V(a) = { u : a(u, v) = 0 for all v in ker j } = null(K^H form).
  out.va_basis = null_space(out.ker_basis.adjoint() * t.form, t.form.norm());

  const Index total = out.ker_basis.cols() + out.va_basis.cols();
  out.direct_sum = false;
  if (total == t.V.dim) {
    Mat joint(t.V.dim, total);
    joint << out.ker_basis, out.va_basis;
    Eigen::BDCSVD<Mat> svd(joint);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > sv(0) * rank_tol) {
      out.direct_sum = true;
      out.joint_condition = sv(0) / sv(sv.size() - 1);
    }
  }
  return out;
}

// --- SeminormedFormData / quotient_completion ---------------------------------

void SeminormedFormData::validate() const {
  H.validate();
  if (form.rows() != form.cols()) throw InvalidInput("form must be square");
  if (jmap.rows() != H.dim || jmap.cols() != form.cols())
    throw InvalidInput("jmap must be dim(H) x dim(V0)");
  const Mat g = seminorm_gram();
  const double scale = std::max(1.0, g.norm());
  if (min_eig_hermitian(g) < -1e-10 * scale)
    throw InvalidInput("seminorm Gram is not positive semi-definite");
}

Mat SeminormedFormData::seminorm_gram() const {
  return hermitian_part(form) +
         (1.0 - gamma) * (jmap.adjoint() * H.gram_matrix() * jmap);
}

QuotientCompletion quotient_completion(const SeminormedFormData& s) {
  s.validate();
  const Mat g = s.seminorm_gram();
  const Index n = g.rows();

  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(g));
  const auto& ev = es.eigenvalues();
  const double cutoff = std::max(ev(n - 1), 0.0) * rank_tol;

  Index rank = 0;
  for (Index i = 0; i < n; ++i)
    if (ev(i) > cutoff) ++rank;

  // Q columns are seminorm-orthonormal; kernel columns span the quotient's
  // null directions, where both a and j must vanish for the descent.
  Mat Q(n, rank), kernel(n, n - rank);
  Index qi = 0, ki = 0;
  for (Index i = 0; i < n; ++i) {
    if (ev(i) > cutoff)
      Q.col(qi++) = es.eigenvectors().col(i) / std::sqrt(ev(i));
    else
      kernel.col(ki++) = es.eigenvectors().col(i);
  }

  if (kernel.cols() > 0) {
    const double scale = std::max({s.form.norm(), s.jmap.norm(), 1.0});
    const double a_right = (s.form * kernel).norm();
    const double a_left = (kernel.adjoint() * s.form).norm();
    const double j_on_kernel = (s.jmap * kernel).norm();
    if (a_right > 1e-8 * scale || a_left > 1e-8 * scale ||
        j_on_kernel > 1e-8 * scale) {
      throw NotDescendable(
          "form or jmap does not vanish on the seminorm kernel "
          "(input is not j-sectorial with the stated vertex)",
          kernel.col(0));
    }
  }

  QuotientCompletion out;
  out.q = Q.adjoint() * g;  // isometric projection onto the quotient
  out.triple.V = HilbertSpaceSpec::euclidean(rank);
  out.triple.H = s.H;
  out.triple.form = Q.adjoint() * s.form * Q;
  out.triple.jmap = s.jmap * Q;
  return out;
}

}  // namespace sectoria
