#ifndef SECTORIA_INVARIANCE_HPP
#define SECTORIA_INVARIANCE_HPP

#include <functional>
#include <string>
#include <vector>

#include "sectoria/assoc_op.hpp"

namespace sectoria {

/// A closed convex set in H together with its orthogonal projection:
/// the real subspace, the positive cone, an upper box { Re u <= bound }
/// and a weighted box { Re u <= 1/m } (the multiplicative-perturbation
/// set).
struct ConvexSetDescriptor {
  enum class Kind { real_subspace, positive_cone, upper_box, weighted_box };
  Kind kind = Kind::real_subspace;
  RVec bound;  // upper_box: bound vector; weighted_box: the 1/m vector

  static ConvexSetDescriptor real_subspace();
  static ConvexSetDescriptor positive_cone();
  static ConvexSetDescriptor upper_box(RVec bound);
  static ConvexSetDescriptor weighted_box(RVec inv_m);

  std::string name() const;
};

/// Euclidean orthogonal projection onto the set (componentwise for all four
/// descriptors; diagonal Grams leave these projections unchanged).
Vec project(const ConvexSetDescriptor& set, const Vec& x);

/// Candidate lift u -> w with P j(u) = j(w).
using Lift = std::function<Vec(const Vec&)>;

/// For j = identity the projection itself is the canonical lift.
Lift projection_lift(const ConvexSetDescriptor& set);

struct CriterionReport {
  double worst_margin = 0.0;  // min over samples of Re a(w, u - w)
  double lift_residual = 0.0;  // max || P j(u) - j(w) ||_H
  bool pass = false;
  int samples = 0;
};

/// Ouhabaz-style invariance criterion, sampled: for random u (plus the
/// canonical basis and its sums), verifies P j(u) = j(lift(u)) and
/// Re a(w, u - w) >= -1e-10 after the automatic accretivity pre-shift
/// tau = max(0, -gamma).
CriterionReport criterion_check(const FormTriple& t,
                                const ConvexSetDescriptor& set,
                                const Lift& lift, int samples = 1000,
                                std::uint64_t seed = 0);

struct DynamicReport {
  double worst_distance = 0.0;  // max over samples/times of dist(S_t x, C)
  bool pass = false;
};

/// Evolves random members of C and measures the distance to C.
DynamicReport dynamic_invariance_check(const Mat& A,
                                       const ConvexSetDescriptor& set,
                                       const std::vector<double>& t_grid,
                                       int samples = 100,
                                       std::uint64_t seed = 0,
                                       double tolerance = 1e-9);

struct MarkovFlags {
  bool real = false;
  bool positive = false;
  bool sup_contractive = false;
  bool l1_contractive = false;  // via the adjoint semigroup's sup bound
  bool all() const { return real && positive && sup_contractive && l1_contractive; }
};

/// Sampled real/positive/sup/L1 suite for A on the weighted sequence space
/// with inner product (u, v) = sum_i w_i u_i conj(v_i),
/// at t in {0.01, 0.1, 1}.
MarkovFlags markov_suite(const Mat& A, const RVec& weights,
                         int samples = 60, std::uint64_t seed = 0);

}  // namespace sectoria

#endif
