#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lhk {

/// Time-dependent coefficient b(t) in one of four forms: constant,
/// polynomial in t, a*cos(omega*t + phi) + c, or tabulated samples with
/// monotone cubic (Fritsch-Carlson) interpolation. Evaluation outside the
/// declared interval throws DomainError; tabulated curves never extrapolate.
class CoefficientCurve {
 public:
  struct Constant {
    double c = 0.0;
  };
  struct Polynomial {
    std::vector<double> coeffs;  // coeffs[k] multiplies t^k
  };
  struct Sinusoid {
    double a = 0.0, omega = 1.0, phi = 0.0, c = 0.0;
  };
  struct Tabulated {
    std::vector<double> t, y, slope;
  };
  using Form = std::variant<Constant, Polynomial, Sinusoid, Tabulated>;

  CoefficientCurve() : CoefficientCurve(constant(0.0)) {}

  static CoefficientCurve constant(double c);
  static CoefficientCurve polynomial(std::vector<double> coeffs);
  static CoefficientCurve sinusoid(double a, double omega, double phi, double c);
  // Requires strictly increasing t with at least two samples.
  static CoefficientCurve tabulated(std::vector<double> t, std::vector<double> y);

  double operator()(double t) const;

  const Form& form() const { return form_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  bool is_constant() const;

  // Mini-language round trip, e.g. "1+0.3*cos", "cos(2*t+0.5)", "1+t^2".
  std::string describe() const;

 private:
  explicit CoefficientCurve(Form f) : form_(std::move(f)) {}

  Form form_;
  double t_min_ = -std::numeric_limits<double>::infinity();
  double t_max_ = std::numeric_limits<double>::infinity();
};

/// Parses the coefficient mini-language: a sum of terms, each an optional
/// numeric factor times one of `cos`, `sin`, `cos(w*t+phi)`, `sin(w*t+phi)`,
/// `t`, `t^k`, or a bare number. The sum must collapse to one of the curve
/// forms (at most one trigonometric term, which cannot be mixed with powers
/// of t). Throws ParseError otherwise.
CoefficientCurve parse_curve(std::string_view text);

}  // namespace lhk
