#ifndef SECTORIA_EVOLUTION_HPP
#define SECTORIA_EVOLUTION_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sectoria/assoc_op.hpp"

namespace sectoria {

/// Margin keeping z strictly inside the open holomorphy sector:
/// |arg z| <= pi/2 - theta - sector_margin.
inline constexpr double sector_margin = 1e-6;

/// exp(-z A) x by scaling-and-squaring (order-13 rational approximant).
/// theta is the semi-angle of the generator's sector; OutsideSector when z
/// leaves the admissible holomorphy sector.
Vec semigroup_apply(const Mat& A, Complex z, const Vec& x, double theta = 0.0);
Vec semigroup_apply(const OperatorBundle& op, Complex z, const Vec& x);

/// Full propagator matrix exp(-z A).
Mat semigroup_matrix(const Mat& A, Complex z, double theta = 0.0);

/// max over a polar grid of sector points of the G-operator norm of
/// e^{-omega z} exp(-z A); expected <= 1 + 1e-9 when (omega, theta') come
/// from the certificate.
double quasi_contractivity_check(const Mat& A, double omega,
                                 double theta_prime, int n_radius = 20,
                                 int n_angle = 20, const Mat& gram = Mat());
double quasi_contractivity_check(const OperatorBundle& op, double omega,
                                 double theta_prime, int n_radius = 20,
                                 int n_angle = 20);

struct Functional {
  std::string name;
  std::function<Complex(const Vec&)> eval;
};

/// (u, 1)_G for the given weights (diagonal Gram).
Functional mass_functional(const RVec& weights);
Functional sup_norm_functional();
Functional pairing_functional(std::string name, const Vec& v, const Mat& gram);

struct TrajectoryTable {
  std::vector<Complex> times;
  std::vector<Vec> states;
  std::vector<std::string> functional_names;
  std::vector<std::vector<Complex>> columns;  // one vector per functional

  /// CSV with header `t_re,t_im,<functional names>`, 17 significant digits.
  std::string to_csv() const;
};

/// Evolves x0 over an ascending nonnegative time grid, stepping with cached
/// propagators per distinct increment (dyadic grids reuse every factor).
TrajectoryTable trajectory(const Mat& A, const Vec& x0,
                           const std::vector<double>& t_grid,
                           const std::vector<Functional>& functionals);

/// Applies exp(-t A) for many real t >= 0. Uses a spectral decomposition
/// when A is self-adjoint in the given Gram (exact for normal instances)
/// and cached expm stepping otherwise.
class Propagator {
 public:
  explicit Propagator(Mat A, Mat gram = Mat());

  Vec apply(double t, const Vec& x) const;
  bool spectral() const { return spectral_; }

 private:
  Mat A_;
  RMat A_real_;  // real fast path when A has no imaginary part
  bool spectral_ = false;
  bool real_ = false;
  // spectral path: A = S^-1 U diag(ev) U^H S with S = gram^(1/2)
  RVec eigenvalues_;
  Mat modes_;      // S^-1 U
  Mat modes_inv_;  // U^H S
  mutable std::map<double, Mat> step_cache_;
  mutable std::map<double, RMat> real_step_cache_;
};

}  // namespace sectoria

#endif
