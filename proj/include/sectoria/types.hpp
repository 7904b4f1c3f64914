#ifndef SECTORIA_TYPES_HPP
#define SECTORIA_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace sectoria {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Singular values below rank_tol * (largest singular value) count as zero.
/// This is the single rank/null-space knob used throughout the library.
inline constexpr double rank_tol = 1e-10;

/// Hermiticity tolerance for Gram matrices and symmetry checks.
inline constexpr double hermitian_tol = 1e-12;

inline Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

/// Skew part as a Hermitian matrix: a = H + iK with H, K Hermitian.
inline Mat skew_part(const Mat& a) {
  return (a - a.adjoint()) / Complex(0.0, 2.0);
}

inline double sym_norm(const Mat& a) { return a.norm(); }

/// Smallest eigenvalue of a Hermitian matrix (input is symmetrized first).
double min_eig_hermitian(const Mat& h);

/// Smallest eigenvalue of the Hermitian-definite pencil (h, g), g > 0.
double min_eig_pencil(const Mat& h, const Mat& g);

/// Largest |eigenvalue| of the Hermitian-definite pencil (k, b), b > 0.
double max_abs_eig_pencil(const Mat& k, const Mat& b);

/// Operator 2-norm of m viewed as a map between Gram geometries:
/// ||m x||_{g_out} / ||x||_{g_in}. Identity Grams give the spectral norm.
double gram_op_norm(const Mat& m, const Mat& g_out, const Mat& g_in);

/// Columns span the null space of m. Singular values below
/// rank_tol * max(largest, scale_hint) count as zero; the hint keeps the
/// cutoff meaningful when m itself is (numerically) the zero matrix.
Mat null_space(const Mat& m, double scale_hint = 0.0);

/// g-orthonormalize the columns of basis (g Hermitian positive definite).
Mat gram_orthonormalize(const Mat& basis, const Mat& g);

/// Hermitian square root and inverse square root via eigendecomposition.
Mat hermitian_sqrt(const Mat& g);
Mat hermitian_inv_sqrt(const Mat& g);

// --- seeded pseudo-randomness -------------------------------------------
//
// All sampling in the library goes through this generator so that runs are
// reproducible across platforms from a single 64-bit seed (std::random
// distributions are implementation-defined and would break byte-identical
// CSV output).

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed + 0x9E3779B97F4A7C15ull) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal();

  Complex cnormal() { return {normal(), normal()}; }

  Vec cvector(Index n);
  Vec unit_vector(Index n);
  Mat cmatrix(Index rows, Index cols);

  /// Independent child stream (for parallel-safe per-item sampling).
  Rng split() { return Rng(next_u64()); }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sectoria

#endif
