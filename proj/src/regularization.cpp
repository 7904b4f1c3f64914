#include "sectoria/regularization.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "sectoria/csv.hpp"

namespace sectoria {

namespace {

void require_sector_valued_elliptic(const FormTriple& a, const Mat& b_form) {
  if (b_form.rows() != a.V.dim || b_form.cols() != a.V.dim)
    throw MismatchedSpaces("b must live on the same V as a");
  FormTriple b = a;
  b.form = b_form;
  try {
    check_j_elliptic(b);
  } catch (const NotElliptic& e) {
    throw BNotElliptic(std::string("regularizer b is not j-elliptic: ") +
                       e.what(), e.witness());
  }
  // b(u) in Sigma_theta: vertex-0 sectorial.
  const double scale = std::max(1.0, b_form.norm());
  if (min_eig_hermitian(hermitian_part(b_form)) < -1e-12 * scale)
    throw BNotElliptic("regularizer b is not sector-valued (Re b(u) < 0)");
  sector_fit(b);  // throws NotSectorial if no finite angle exists
}

}  // namespace

FormTriple build_regularized(const FormTriple& a, const Mat& b_form, int n) {
  a.validate();
  if (n <= 0) throw InvalidInput("n must be positive");
  require_sector_valued_elliptic(a, b_form);
  FormTriple out = a;
  out.form = a.form + b_form / static_cast<double>(n);
  return out;
}

ConvergenceReport convergence_sweep(const FormTriple& a, const Mat& b_form,
                                    double lambda, const Vec& f,
                                    const std::vector<int>& n_list) {
  a.validate();
  require_sector_valued_elliptic(a, b_form);

  const SectorCertificate cert = sector_fit(a);
  if (lambda <= std::max(-cert.vertex, 0.0))
    throw ShiftTooSmall("lambda must exceed max(-gamma, 0)");

  // Limit resolvent through the quotient completion; for complete (normed)
  // data the quotient is trivial and this equals the direct resolvent.
  SeminormedFormData limit;
  limit.form = a.form;
  limit.jmap = a.jmap;
  limit.H = a.H;
  limit.gamma = cert.vertex;
  const QuotientCompletion qc = quotient_completion(limit);
  const Mat r_limit = resolvent(qc.triple, lambda);
  const Vec rf_limit = r_limit * f;

  const Mat gh = a.H.gram_matrix();
  ConvergenceReport report;
  report.lambda = lambda;
  for (int n : n_list) {
    FormTriple an = a;
    an.form = a.form + b_form / static_cast<double>(n);
    const Mat rn = resolvent(an, lambda);
    report.n_values.push_back(n);
    const Vec diff = rn * f - rf_limit;
    report.strong_errors.push_back(std::sqrt(
        std::max(0.0, diff.dot(gh * diff).real())));
    report.norm_errors.push_back(gram_op_norm(rn - r_limit, gh, gh));
  }
  return report;
}

double regularizer_scale(const Mat& b_form, const Mat& gram) {
  return std::max(max_abs_eig_pencil(hermitian_part(b_form), gram), 1e-300);
}

std::string ConvergenceReport::to_csv() const {
  std::ostringstream out;
  out << "n,strong_error,norm_error\n";
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    out << n_values[i] << ',' << csv::number(strong_errors[i]) << ','
        << csv::number(norm_errors[i]) << '\n';
  }
  return out.str();
}

}  // namespace sectoria
