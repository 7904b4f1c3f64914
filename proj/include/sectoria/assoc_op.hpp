#ifndef SECTORIA_ASSOC_OP_HPP
#define SECTORIA_ASSOC_OP_HPP

#include "sectoria/form_core.hpp"

namespace sectoria {

/// The m-sectorial operator extracted from (a, j), together with the data
/// it was extracted from. resolvent_at re-solves from the source triple.
struct OperatorBundle {
  Mat A;                     // dim(H) x dim(H)
  double lambda_ref = 0.0;   // shift used for extraction
  DecompositionBundle decomposition;
  SectorCertificate cert;
  FormTriple source;

  Mat resolvent_at(double lambda) const;
  const HilbertSpaceSpec& space() const { return source.H; }
};

struct ClassicalFormResult {
  Mat a_c;          // classical form matrix on H
  Mat h_c;          // classical form of the real part
  double C = 1.0;   // comparison constant, Re a_c(x) <= C h_c(x)
  double shift = 0.0;  // tau applied so the shifted form has omega <= -1
};

/// R(lambda) = J (form + lambda j^H G_H j)^{-1} j^H G_H, the resolvent
/// (lambda I + A)^{-1} on H. Requires Lax-Milgram coercivity at lambda
/// (ShiftTooSmall otherwise); SingularSolve on numerically singular systems.
Mat resolvent(const FormTriple& t, double lambda);

/// Operator associated with (a, j) (requires j(V) dense and j-ellipticity);
/// extracted as R(lambda)^{-1} - lambda I at lambda = omega + 1 and
/// cross-checked at omega + 2.
///
/// Under j-ellipticity the domain subspace D_H(a) coincides with V(a) in
/// finite dimension, so a(u, v) = (A j(u), j(v)) holds exactly for u in
/// V(a). It does not extend to arbitrary u with j(u) in D(A): adding a
/// ker-j direction changes a(u, .) but not j(u).
OperatorBundle extract_operator(const FormTriple& t);

/// Extraction through the restriction to V(a); needs V = V(a) + ker j and
/// ellipticity only on V(a). Coincides with extract_operator whenever both
/// are defined.
OperatorBundle extract_operator_Va(const FormTriple& t);

/// Incomplete case: quotient completion followed by extraction.
OperatorBundle extract_incomplete(const SeminormedFormData& s);

/// Operator associated with (a*, j); equals the G_H-adjoint of A.
Mat adjoint_operator(const FormTriple& t);

ClassicalFormResult classical_form(const FormTriple& t);

/// Regular part a_r: the classical form of the quotient completion,
/// restricted to j(D(a)) (= H in finite dimension).
Mat regular_part(const SeminormedFormData& s);

namespace detail {
/// Coercivity constant of the Hermitian part of (form + lambda W) against
/// G_V; positive means the Lax-Milgram solve at lambda is safe.
double lax_milgram_margin(const FormTriple& t, double lambda);
}  // namespace detail

}  // namespace sectoria

#endif
