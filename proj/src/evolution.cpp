#include "sectoria/evolution.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace sectoria {

namespace {

void require_in_sector(Complex z, double theta) {
  if (!(z.real() >= 0.0))
    throw OutsideSector("Re z must be nonnegative, z = (" +
                        std::to_string(z.real()) + ", " +
                        std::to_string(z.imag()) + ")");
  if (z == Complex(0.0, 0.0)) return;
  const double limit = M_PI_2 - theta - sector_margin;
  if (std::abs(std::arg(z)) > limit)
    throw OutsideSector("z outside the holomorphy sector (|arg z| > pi/2 - "
                        "theta - margin)");
}

}  // namespace

Mat semigroup_matrix(const Mat& A, Complex z, double theta) {
  require_in_sector(z, theta);
  if (A.rows() == 0) return A;
  const Mat m = -z * A;
  return m.exp();
}

Vec semigroup_apply(const Mat& A, Complex z, const Vec& x, double theta) {
  return semigroup_matrix(A, z, theta) * x;
}

Vec semigroup_apply(const OperatorBundle& op, Complex z, const Vec& x) {
  return semigroup_apply(op.A, z, x, op.cert.semi_angle);
}

double quasi_contractivity_check(const Mat& A, double omega,
                                 double theta_prime, int n_radius,
                                 int n_angle, const Mat& gram) {
  const Index n = A.rows();
  const bool weighted = gram.size() != 0;
  const Mat s = weighted ? hermitian_sqrt(gram) : Mat();
  const Mat si = weighted ? hermitian_inv_sqrt(gram) : Mat();

  double worst = 0.0;
  for (int ir = 0; ir < n_radius; ++ir) {
    // log-spaced radii around unit scale
    const double r = std::pow(10.0, -2.0 + 3.0 * ir / std::max(1, n_radius - 1));
    for (int ia = 0; ia < n_angle; ++ia) {
      const double phi = n_angle == 1
                             ? 0.0
                             : -theta_prime + 2.0 * theta_prime * ia / (n_angle - 1);
      const Complex z = std::polar(r, phi);
      Mat e = semigroup_matrix(A, z, 0.0) * std::exp(-omega * z);
      if (weighted) e = s * e * si;
      Eigen::BDCSVD<Mat> svd(e);
      worst = std::max(worst, svd.singularValues()(0));
    }
  }
  return worst;
}

double quasi_contractivity_check(const OperatorBundle& op, double omega,
                                 double theta_prime, int n_radius,
                                 int n_angle) {
  return quasi_contractivity_check(op.A, omega, theta_prime, n_radius, n_angle,
                                   op.source.H.gram_matrix());
}

Functional mass_functional(const RVec& weights) {
  RVec w = weights;
  return {"mass", [w](const Vec& u) {
            Complex s = 0.0;
            for (Index i = 0; i < u.size(); ++i) s += w(i) * u(i);
            return s;
          }};
}

Functional sup_norm_functional() {
  return {"sup_norm", [](const Vec& u) {
            return Complex(u.size() ? u.cwiseAbs().maxCoeff() : 0.0, 0.0);
          }};
}

Functional pairing_functional(std::string name, const Vec& v, const Mat& gram) {
  Vec gv = gram.size() ? Vec(gram.adjoint() * v) : v;
  return {std::move(name), [gv](const Vec& u) { return gv.dot(u); }};
}

std::string TrajectoryTable::to_csv() const {
  std::ostringstream out;
  out << "t_re,t_im";
  for (const auto& name : functional_names) out << ',' << name;
  out << '\n';
  char buf[64];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out << buf;
  };
  for (std::size_t k = 0; k < times.size(); ++k) {
    put(times[k].real());
    out << ',';
    put(times[k].imag());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out << ',';
      const Complex val = columns[c][k];
      // real-valued columns stay scalar; complex pairings print re+im
      if (std::abs(val.imag()) > 0.0) {
        put(val.real());
        out << "+";
        put(val.imag());
        out << "i";
      } else {
        put(val.real());
      }
    }
    out << '\n';
  }
  return out.str();
}

TrajectoryTable trajectory(const Mat& A, const Vec& x0,
                           const std::vector<double>& t_grid,
                           const std::vector<Functional>& functionals) {
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (t_grid[k] < 0.0) throw InvalidInput("t_grid must be nonnegative");
    if (k > 0 && t_grid[k] < t_grid[k - 1])
      throw InvalidInput("t_grid must be ascending");
  }

  TrajectoryTable table;
  for (const auto& f : functionals) table.functional_names.push_back(f.name);
  table.columns.resize(functionals.size());

  std::map<double, Mat> cache;
  Vec state = x0;
  double t_prev = 0.0;
  for (double t : t_grid) {
    const double dt = t - t_prev;
    if (dt > 0.0) {
      auto it = cache.find(dt);
      if (it == cache.end())
        it = cache.emplace(dt, semigroup_matrix(A, dt)).first;
      state = it->second * state;
    }
    t_prev = t;
    table.times.emplace_back(t, 0.0);
    table.states.push_back(state);
    for (std::size_t c = 0; c < functionals.size(); ++c)
      table.columns[c].push_back(functionals[c].eval(state));
  }
  return table;
}

Propagator::Propagator(Mat A, Mat gram) : A_(std::move(A)) {
  const bool weighted = gram.size() != 0;
  const Mat ga = weighted ? Mat(gram * A_) : A_;
  const double scale = std::max(1.0, ga.norm());
  if ((ga - ga.adjoint()).norm() <= 1e-12 * scale) {
    spectral_ = true;
    const Mat s = weighted ? hermitian_sqrt(gram) : Mat();
    const Mat si = weighted ? hermitian_inv_sqrt(gram) : Mat();
    const Mat b = weighted ? Mat(s * A_ * si) : A_;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(b));
    eigenvalues_ = es.eigenvalues();
    modes_ = weighted ? Mat(si * es.eigenvectors()) : es.eigenvectors();
    modes_inv_ = weighted ? Mat(es.eigenvectors().adjoint() * s)
                          : Mat(es.eigenvectors().adjoint());
    return;
  }
  if (A_.imag().norm() <= 1e-300) {
    real_ = true;
    A_real_ = A_.real();
  }
}

Vec Propagator::apply(double t, const Vec& x) const {
  if (t < 0.0) throw OutsideSector("Propagator requires t >= 0");
  if (t == 0.0) return x;
  if (spectral_) {
    Vec y = modes_inv_ * x;
    for (Index i = 0; i < y.size(); ++i) y(i) *= std::exp(-t * eigenvalues_(i));
    return modes_ * y;
  }
  if (real_) {
    auto it = real_step_cache_.find(t);
    if (it == real_step_cache_.end()) {
      RMat e = (-t * A_real_).exp();
      it = real_step_cache_.emplace(t, std::move(e)).first;
    }
    return it->second * x.real() + Complex(0, 1) * (it->second * x.imag());
  }
  auto it = step_cache_.find(t);
  if (it == step_cache_.end())
    it = step_cache_.emplace(t, semigroup_matrix(A_, t)).first;
  return it->second * x;
}

}  // namespace sectoria
