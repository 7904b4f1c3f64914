#include "oracles.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace sectoria::oracles {

double monte_carlo_tan_theta(const FormTriple& t, int samples,
                             std::uint64_t seed) {
  Rng rng(seed);
  auto ratio = [&](const Vec& u) {
    const Complex a = t.a(u);
    return a.real() > 0.0 ? std::abs(a.imag()) / a.real() : 0.0;
  };
  double worst = 0.0;
  Vec best = Vec::Unit(t.V.dim, 0);
  for (int k = 0; k < samples; ++k) {
    const Vec u = rng.unit_vector(t.V.dim);
    const double r = ratio(u);
    if (r > worst) {
      worst = r;
      best = u;
    }
  }
  // local refinement around the best sample: shrinking Gaussian proposals
  double radius = 0.5;
  for (int round = 0; round < 120; ++round) {
    bool improved = false;
    for (int k = 0; k < 200; ++k) {
      Vec u = best + radius * rng.cvector(t.V.dim);
      u.normalize();
      const double r = ratio(u);
      if (r > worst) {
        worst = r;
        best = u;
        improved = true;
      }
    }
    if (!improved) radius *= 0.5;
    if (radius < 1e-9) break;
  }
  return worst;
}

double sector_violation(const FormTriple& t, double gamma, double tan_theta,
                        int samples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec u = rng.unit_vector(t.V.dim);
    const Complex a = t.a(u) - gamma * t.H.norm2(t.j(u));
    worst = std::max(worst, -a.real());
    worst = std::max(worst, std::abs(a.imag()) - tan_theta * a.real());
  }
  return worst;
}

Mat brute_force_extract(const FormTriple& t) {
  const Mat rhs = t.jmap.adjoint() * t.H.gram_matrix();  // dimV x dimH
  // Orthonormal basis of range(rhs) and the projector onto its complement.
  Eigen::ColPivHouseholderQR<Mat> qr(rhs);
  const Index r = qr.rank();
  const Mat q_full = qr.householderQ();
  const Mat q = q_full.leftCols(r);
  const Mat p_perp =
      Mat::Identity(t.V.dim, t.V.dim) - q * q.adjoint();

  // D_H(a) directions: form * u must stay inside range(rhs).
  const Mat dh_basis = null_space(p_perp * t.form, t.form.norm());
  if (dh_basis.cols() != t.H.dim)
    throw std::runtime_error("oracle: dim D_H(a) != dim H");

  Mat x(t.H.dim, t.H.dim), f(t.H.dim, t.H.dim);
  for (Index c = 0; c < dh_basis.cols(); ++c) {
    const Vec u = dh_basis.col(c);
    x.col(c) = t.jmap * u;
    f.col(c) = rhs.colPivHouseholderQr().solve(t.form * u);
  }
  return f * x.partialPivLu().solve(Mat::Identity(t.H.dim, t.H.dim));
}

Vec crank_nicolson(const Mat& A, double t, const Vec& x, int steps) {
  const double dt = t / steps;
  const Index n = A.rows();
  const Mat lhs = Mat::Identity(n, n) + (dt / 2) * A;
  const Mat rhs = Mat::Identity(n, n) - (dt / 2) * A;
  Eigen::PartialPivLU<Mat> lu(lhs);
  Vec y = x;
  for (int k = 0; k < steps; ++k) y = lu.solve(rhs * y);
  return y;
}

Vec qp_box_projection(const Vec& x, const RVec& bound, const RVec& weights) {
  // the box lives in the real part of the space: minimize the weighted
  // distance over real y with y <= bound, enumerating active constraints
  const Index n = x.size();
  if (n > 20) throw std::runtime_error("oracle limited to small dimensions");
  double best = std::numeric_limits<double>::infinity();
  Vec best_y = Vec::Zero(n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Vec y(n);
    bool feasible = true;
    for (Index i = 0; i < n; ++i) {
      const bool active = (mask >> i) & 1u;
      y(i) = active ? bound(i) : x(i).real();
      if (y(i).real() > bound(i) + 1e-12) feasible = false;
    }
    if (!feasible) continue;
    double cost = 0.0;
    for (Index i = 0; i < n; ++i) cost += weights(i) * std::norm(x(i) - y(i));
    if (cost < best) {
      best = cost;
      best_y = y;
    }
  }
  return best_y;
}

FormTriple random_elliptic_triple(Rng& rng, Index dim_v, Index dim_h,
                                  bool random_grams) {
  FormTriple t;
  t.V.dim = dim_v;
  t.H.dim = dim_h;
  if (random_grams) {
    const Mat lv = rng.cmatrix(dim_v, dim_v);
    t.V.gram = lv * lv.adjoint() + Mat::Identity(dim_v, dim_v);
    const Mat lh = rng.cmatrix(dim_h, dim_h);
    t.H.gram = lh * lh.adjoint() + Mat::Identity(dim_h, dim_h);
  }
  const Mat b = rng.cmatrix(dim_v, dim_v);
  const Mat hm = b * b.adjoint() + 0.3 * Mat::Identity(dim_v, dim_v);
  Mat k = rng.cmatrix(dim_v, dim_v);
  k = hermitian_part(k);
  t.form = hm + Complex(0, 1) * k;
  // full row rank j
  for (;;) {
    t.jmap = rng.cmatrix(dim_h, dim_v);
    Eigen::BDCSVD<Mat> svd(t.jmap);
    if (svd.singularValues()(dim_h - 1) > 0.1) break;
  }
  return t;
}

FormTriple random_coercive_triple(Rng& rng, Index dim_v, Index dim_h) {
  FormTriple t = random_elliptic_triple(rng, dim_v, dim_h, false);
  // shift so Re a(u) >= mu ||u||^2 + ||j u||^2, i.e. omega <= -1 in (2.2)
  t.form += (t.jmap.adjoint() * t.jmap) +
            0.1 * Mat::Identity(dim_v, dim_v);
  return t;
}

Mat hand_robin_operator_1d(int cells, double length, double beta0,
                           double beta1) {
  const int n = cells + 1;
  const double h = length / cells;
  Mat s = Mat::Zero(n, n);
  for (int c = 0; c < cells; ++c) {
    s(c, c) += 1 / h;
    s(c + 1, c + 1) += 1 / h;
    s(c, c + 1) -= 1 / h;
    s(c + 1, c) -= 1 / h;
  }
  s(0, 0) += beta0;
  s(n - 1, n - 1) += beta1;
  RVec mass = RVec::Constant(n, h);
  mass(0) = mass(n - 1) = h / 2;
  return mass.cwiseInverse().cast<Complex>().asDiagonal() * s;
}

Mat cauchy_circle_reconstruction(const Mat& A, double t, double r,
                                 int points) {
  const Index n = A.rows();
  Mat sum = Mat::Zero(n, n);
  for (int k = 0; k < points; ++k) {
    const double phi = 2.0 * M_PI * k / points;
    const Complex z = t + r * std::exp(Complex(0, phi));
    const Mat s = Mat((-z * A).exp());
    // (1/2 pi i) integral S_z / (z - t) dz, trapezoid on the circle
    sum += s;  // dz/(z-t) = i dphi, so the quotient drops out
  }
  return sum / points;
}

}  // namespace sectoria::oracles
