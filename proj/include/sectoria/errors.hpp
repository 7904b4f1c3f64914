#ifndef SECTORIA_ERRORS_HPP
#define SECTORIA_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

#include "sectoria/types.hpp"

namespace sectoria {

/// Malformed input: shape mismatches, bad Grams, schema violations.
/// The CLI maps this to exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical refusal: the input is well-formed but the requested
/// certificate or construction does not exist. Carries a witness vector
/// so callers can serialize the reason. The CLI maps this to exit code 3.
class MathRefusal : public std::runtime_error {
 public:
  MathRefusal(std::string kind, std::string what, Vec witness = Vec())
      : std::runtime_error(what), kind_(std::move(kind)),
        witness_(std::move(witness)) {}

  const std::string& kind() const { return kind_; }
  const Vec& witness() const { return witness_; }

 private:
  std::string kind_;
  Vec witness_;
};

struct NotSectorial : MathRefusal {
  explicit NotSectorial(const std::string& what, Vec witness = Vec())
      : MathRefusal("NotSectorial", what, std::move(witness)) {}
};

struct NotElliptic : MathRefusal {
  explicit NotElliptic(const std::string& what, Vec witness = Vec())
      : MathRefusal("NotElliptic", what, std::move(witness)) {}
};

struct NotDescendable : MathRefusal {
  explicit NotDescendable(const std::string& what, Vec witness = Vec())
      : MathRefusal("NotDescendable", what, std::move(witness)) {}
};

struct ShiftTooSmall : MathRefusal {
  explicit ShiftTooSmall(const std::string& what, Vec witness = Vec())
      : MathRefusal("ShiftTooSmall", what, std::move(witness)) {}
};

struct SingularSolve : MathRefusal {
  explicit SingularSolve(const std::string& what, Vec witness = Vec())
      : MathRefusal("SingularSolve", what, std::move(witness)) {}
};

struct SumDecompositionFails : MathRefusal {
  explicit SumDecompositionFails(const std::string& what, Vec witness = Vec())
      : MathRefusal("SumDecompositionFails", what, std::move(witness)) {}
};

struct NotEllipticOnVa : MathRefusal {
  explicit NotEllipticOnVa(const std::string& what, Vec witness = Vec())
      : MathRefusal("NotEllipticOnVa", what, std::move(witness)) {}
};

struct OutsideSector : MathRefusal {
  explicit OutsideSector(const std::string& what, Vec witness = Vec())
      : MathRefusal("OutsideSector", what, std::move(witness)) {}
};

struct MismatchedSpaces : MathRefusal {
  explicit MismatchedSpaces(const std::string& what, Vec witness = Vec())
      : MathRefusal("MismatchedSpaces", what, std::move(witness)) {}
};

struct BNotElliptic : MathRefusal {
  explicit BNotElliptic(const std::string& what, Vec witness = Vec())
      : MathRefusal("BNotElliptic", what, std::move(witness)) {}
};

struct LiftMismatch : MathRefusal {
  explicit LiftMismatch(const std::string& what, Vec witness = Vec())
      : MathRefusal("LiftMismatch", what, std::move(witness)) {}
};

struct CellNotSectorial : MathRefusal {
  CellNotSectorial(const std::string& what, int cell, Vec witness = Vec())
      : MathRefusal("CellNotSectorial", what, std::move(witness)),
        cell_index(cell) {}
  int cell_index;
};

struct NonPositiveWeight : MathRefusal {
  explicit NonPositiveWeight(const std::string& what, Vec witness = Vec())
      : MathRefusal("NonPositiveWeight", what, std::move(witness)) {}
};

struct SetsOverlap : MathRefusal {
  explicit SetsOverlap(const std::string& what)
      : MathRefusal("SetsOverlap", what) {}
};

struct SupportTooLarge : MathRefusal {
  explicit SupportTooLarge(const std::string& what)
      : MathRefusal("SupportTooLarge", what) {}
};

struct WrongBoundaryCondition : MathRefusal {
  explicit WrongBoundaryCondition(const std::string& what)
      : MathRefusal("WrongBoundaryCondition", what) {}
};

struct LambdaOnSpectrum : MathRefusal {
  explicit LambdaOnSpectrum(const std::string& what, Vec witness = Vec())
      : MathRefusal("LambdaOnSpectrum", what, std::move(witness)) {}
};

struct OnDirichletSpectrum : MathRefusal {
  explicit OnDirichletSpectrum(const std::string& what)
      : MathRefusal("OnDirichletSpectrum", what) {}
};

struct CertificateFails : MathRefusal {
  explicit CertificateFails(const std::string& what, Vec witness = Vec())
      : MathRefusal("CertificateFails", what, std::move(witness)) {}
};

}  // namespace sectoria

#endif
