#ifndef SECTORIA_FORM_CORE_HPP
#define SECTORIA_FORM_CORE_HPP

#include <optional>
#include <vector>

#include "sectoria/errors.hpp"
#include "sectoria/types.hpp"

namespace sectoria {

/// A finite-dimensional Hilbert space: dimension plus a Hermitian
/// positive-definite Gram matrix, (x, y) = y^H * gram * x.
struct HilbertSpaceSpec {
  Index dim = 0;
  Mat gram;  // empty means identity

  static HilbertSpaceSpec euclidean(Index n);
  static HilbertSpaceSpec weighted(const RVec& w);

  const Mat& gram_matrix() const;
  Complex inner(const Vec& x, const Vec& y) const;  // (x, y)
  double norm(const Vec& x) const;
  double norm2(const Vec& x) const;  // ||x||^2, clamped at 0

  /// Throws InvalidInput unless gram is Hermitian within 1e-12 and
  /// positive definite.
  void validate() const;

 private:
  mutable Mat identity_cache_;
};

/// The pair (a, j): a sesquilinear form on V given by a matrix with
/// a(u, v) = v^H * form * u, and a linear map j : V -> H given by jmap.
struct FormTriple {
  HilbertSpaceSpec V;
  HilbertSpaceSpec H;
  Mat form;  // dim(V) x dim(V)
  Mat jmap;  // dim(H) x dim(V)

  void validate() const;

  Complex a(const Vec& u, const Vec& v) const;  // a(u, v)
  Complex a(const Vec& u) const { return a(u, u); }
  Vec j(const Vec& u) const { return jmap * u; }

  /// Continuity constant c with |a(u,v)| <= c ||u||_V ||v||_V
  /// (largest singular value of the form in the Gram geometry).
  double continuity_constant() const;

  /// j^H G_H j, the Gram of u -> ||j(u)||_H^2 on V.
  Mat jmap_gram() const;

  /// True when j(V) is dense in H, i.e. jmap has full row rank.
  bool j_range_dense() const;
};

/// Result of the sectoriality fit: a(u) - vertex * ||j(u)||_H^2 lies in the
/// closed sector of half-angle semi_angle for every u. When the form is
/// also j-elliptic, (omega, mu) carry the ellipticity constants.
struct SectorCertificate {
  double vertex = 0.0;
  double semi_angle = 0.0;  // in [0, pi/2)
  double tan_theta = 0.0;
  std::optional<double> omega;
  std::optional<double> mu;
  std::vector<Vec> witnesses;

  bool elliptic() const { return omega.has_value() && mu.has_value(); }
};

/// Bases for ker j and V(a) = { u : a(u, v) = 0 for all v in ker j }.
struct DecompositionBundle {
  Mat ker_basis;  // G_V-orthonormal columns spanning null(J)
  Mat va_basis;   // columns spanning V(a)
  bool direct_sum = false;
  double joint_condition = 0.0;  // condition number of [ker | va], logged
};

/// Form data carrying only the seminorm (u, v)_a = (Re a)(u, v)
/// + (1 - gamma) (j u, j v)_H; the completion is realized as the quotient
/// by the seminorm kernel.
struct SeminormedFormData {
  Mat form;
  Mat jmap;
  HilbertSpaceSpec H;
  double gamma = 0.0;

  void validate() const;

  /// Gram matrix of the seminorm: Re-part(form) + (1-gamma) j^H G_H j.
  Mat seminorm_gram() const;
};

struct QuotientCompletion {
  FormTriple triple;  // lifted form and map on the quotient space
  Mat q;              // dim(quotient) x dim(V0), the isometric projection
};

/// Fits the canonical sector certificate of (a, j).
///
/// The vertex is min(0, gamma_max) where gamma_max is the largest gamma
/// with Re-part(form) - gamma j^H G_H j >= 0 (bisection to 1e-10); when the
/// semi-angle at that vertex is degenerate the vertex is lowered until a
/// semi-angle strictly below pi/2 exists. Throws NotSectorial if none does.
SectorCertificate sector_fit(const FormTriple& t);

/// Searches (omega, mu) with Re a(u) + omega ||j(u)||^2 >= mu ||u||_V^2 and
/// mu > 0. Throws NotElliptic with a kernel witness when Re a is not
/// positive definite on ker j.
std::pair<double, double> check_j_elliptic(const FormTriple& t);

/// sector_fit plus the ellipticity constants when they exist.
SectorCertificate certify(const FormTriple& t);

DecompositionBundle kernel_and_Va(const FormTriple& t);

/// Quotient by the seminorm kernel; the lifted form satisfies
/// a~(q u, q v) = a(u, v) and j~ q = j. Throws NotDescendable when the
/// form or j fail to vanish on the seminorm kernel.
QuotientCompletion quotient_completion(const SeminormedFormData& s);

}  // namespace sectoria

#endif
