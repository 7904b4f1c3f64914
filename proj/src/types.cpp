#include "sectoria/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace sectoria {

double min_eig_hermitian(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double min_eig_pencil(const Mat& h, const Mat& g) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(
      hermitian_part(h), hermitian_part(g), Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  return es.eigenvalues()(0);
}

double max_abs_eig_pencil(const Mat& k, const Mat& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(
      hermitian_part(k), hermitian_part(b), Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double gram_op_norm(const Mat& m, const Mat& g_out, const Mat& g_in) {
  const Mat s_out = hermitian_sqrt(g_out);
  const Mat s_in_inv = hermitian_inv_sqrt(g_in);
  Eigen::BDCSVD<Mat> svd(s_out * m * s_in_inv);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

Mat null_space(const Mat& m, double scale_hint) {
  if (m.rows() == 0) return Mat::Identity(m.cols(), m.cols());
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff =
      std::max(sv.size() ? sv(0) : 0.0, scale_hint) * rank_tol;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

Mat gram_orthonormalize(const Mat& basis, const Mat& g) {
  if (basis.cols() == 0) return basis;
  // Eigendecomposition of the small Gram of the basis; drop rank-deficient
  // directions at the rank_tol cutoff.
  const Mat small = basis.adjoint() * g * basis;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(small));
  const auto& ev = es.eigenvalues();
  const double cutoff = ev(ev.size() - 1) * rank_tol;
  Index keep = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cutoff) ++keep;
  Mat out(basis.rows(), keep);
  Index col = 0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff) {
      out.col(col++) = basis * es.eigenvectors().col(i) / std::sqrt(ev(i));
    }
  }
  return out;
}

Mat hermitian_sqrt(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(g));
  Vec d = es.eigenvalues().cast<Complex>();
  for (Index i = 0; i < d.size(); ++i)
    d(i) = std::sqrt(std::max(0.0, d(i).real()));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

Mat hermitian_inv_sqrt(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(g));
  Vec d = es.eigenvalues().cast<Complex>();
  for (Index i = 0; i < d.size(); ++i) {
    const double x = d(i).real();
    d(i) = x > 0.0 ? 1.0 / std::sqrt(x) : 0.0;
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  spare_ = r * std::sin(phi);
  have_spare_ = true;
  return r * std::cos(phi);
}

Vec Rng::cvector(Index n) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = cnormal();
  return v;
}

Vec Rng::unit_vector(Index n) {
  Vec v = cvector(n);
  const double nrm = v.norm();
  return nrm > 0 ? Vec(v / nrm) : v;
}

Mat Rng::cmatrix(Index rows, Index cols) {
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = cnormal();
  return m;
}

}  // namespace sectoria
