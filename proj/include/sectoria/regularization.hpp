#ifndef SECTORIA_REGULARIZATION_HPP
#define SECTORIA_REGULARIZATION_HPP

#include <vector>

#include "sectoria/assoc_op.hpp"

namespace sectoria {

struct ConvergenceReport {
  std::vector<int> n_values;
  std::vector<double> strong_errors;  // ||R_n f - R f||_H
  std::vector<double> norm_errors;    // ||R_n - R|| in the H geometry
  double lambda = 0.0;

  std::string to_csv() const;  // n,strong_error,norm_error
};

/// a_n = a + (1/n) b on shared spaces. b must be j-elliptic and
/// sector-valued (vertex-0 sectorial); the accretive difference condition
/// then holds with gamma_n = 0.
FormTriple build_regularized(const FormTriple& a, const Mat& b_form, int n);

inline std::vector<int> dyadic_n(int n_max = 1024) {
  std::vector<int> out;
  for (int n = 1; n <= n_max; n *= 2) out.push_back(n);
  return out;
}

/// Resolvent errors of the a_n against the limit form at shift lambda,
/// lambda > max(-gamma, 0).
ConvergenceReport convergence_sweep(const FormTriple& a, const Mat& b_form,
                                    double lambda, const Vec& f,
                                    const std::vector<int>& n_list);

/// Largest generalized eigenvalue of (Re b, gram): the natural scale for
/// normalizing a regularizer so a fixed dyadic n budget sees the limit
/// (an unscaled grid energy has norm ~ 4/h^2 and would need n >> 1/h^2).
double regularizer_scale(const Mat& b_form, const Mat& gram);

}  // namespace sectoria

#endif
