#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lhk/algebra.hpp"
#include "lhk/rational.hpp"

namespace lhk {

/// Exponent vector of a monomial over m copies of r generators. Slot
/// a*r + alpha (0-based) is the exponent of generator alpha in copy a.
using Exponents = std::vector<std::uint16_t>;

// Graded lexicographic: total degree first, then lexicographic on slots.
struct GradedLex {
  bool operator()(const Exponents& lhs, const Exponents& rhs) const;
};

/// Polynomial in the symmetric algebra S_g^(m) with exact rational
/// coefficients. Values are immutable once built; zero coefficients are never
/// stored, so equal polynomials compare equal term by term.
class SymPoly {
 public:
  using Terms = std::map<Exponents, Rational, GradedLex>;

  SymPoly(int r, int m);

  static SymPoly constant(int r, int m, const Rational& value);
  // Generator v_alpha of copy `copy` (both 0-based).
  static SymPoly generator(int r, int m, int alpha, int copy = 0);

  int r() const { return r_; }
  int m() const { return m_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  Rational coefficient(const Exponents& e) const;

  SymPoly& add_term(const Exponents& e, const Rational& coeff);

  // Partial derivative with respect to v_alpha in copy `copy`.
  SymPoly derivative(int alpha, int copy = 0) const;

  // Evaluates with slot values given copy-major (length m*r).
  double evaluate(std::span<const double> values) const;

  bool operator==(const SymPoly&) const = default;

  friend SymPoly operator+(const SymPoly& p, const SymPoly& q);
  friend SymPoly operator-(const SymPoly& p, const SymPoly& q);
  friend SymPoly operator-(const SymPoly& p);
  friend SymPoly operator*(const SymPoly& p, const SymPoly& q);
  friend SymPoly operator*(const Rational& s, const SymPoly& p);

 private:
  int r_;
  int m_;
  Terms terms_;
};

SymPoly add(const SymPoly& p, const SymPoly& q);
SymPoly mul(const SymPoly& p, const SymPoly& q);
SymPoly scale(const SymPoly& p, const Rational& s);
SymPoly pow(const SymPoly& p, unsigned k);

/// Copy-diagonal Lie-Poisson bracket:
/// {P,Q} = sum_a sum_{alpha,beta,gamma} c(alpha,beta,gamma) v_gamma^(a)
///         dP/dv_alpha^(a) dQ/dv_beta^(a).
SymPoly poisson_bracket(const SymPoly& p, const SymPoly& q, const StructureConstants& sc);

// Primitive m-th coproduct: each v_alpha becomes sum_a v_alpha^(a). Requires
// p.m() == 1.
SymPoly coproduct(const SymPoly& p, int m_target);

// Places a k-copy polynomial in the leading k copies of m >= k copies.
SymPoly embed(const SymPoly& p, int m);

// sigma[a] is the image of copy a (0-based). Throws InvalidArgument unless
// sigma is a bijection of {0..m-1}.
SymPoly permute_copies(const SymPoly& p, std::span<const int> sigma);

// Transposition S_ij of copies i and j (0-based) as a permutation vector.
std::vector<int> transposition(int m, int i, int j);

bool is_casimir(const SymPoly& p, const StructureConstants& sc);

struct CasimirBasis {
  // Constant 1 (always present) followed by invariants with zero constant
  // term; each invariant is a primitive integer vector with positive leading
  // coefficient in graded-lex order.
  std::vector<SymPoly> invariants;
  int dmax = 0;

  int dimension() const { return 1 + static_cast<int>(invariants.size()); }
};

constexpr std::size_t kDefaultCasimirCap = 5000;

// Exact basis of {P : deg P <= dmax, {P, v_alpha} = 0 for all alpha}.
// Throws SizeError when binomial(r + dmax, dmax) exceeds `cap`.
CasimirBasis find_casimirs(const StructureConstants& sc, int dmax,
                           std::size_t cap = kDefaultCasimirCap);

// All exponent vectors of degree exactly d over n slots, in graded-lex order.
std::vector<Exponents> monomials_of_degree(int n, int d);

// Canonical text form, e.g. "1 * v1_1 * v3_1 + -1 * v2_1^2".
std::string to_string(const SymPoly& p);

// Parses sums/products of rationals and generators "v<alpha>" or
// "v<alpha>_<copy>" (1-based), with ^, parentheses and unary minus. When
// m == 0 the copy count is the largest copy index seen (at least 1).
SymPoly parse_sympoly(std::string_view text, int r, int m = 0);

}  // namespace lhk
