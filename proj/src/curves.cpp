#include "lhk/curves.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>

#include "lhk/error.hpp"

namespace lhk {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Fritsch-Carlson slopes: harmonic-mean interior slopes, zero at extrema.
std::vector<double> monotone_slopes(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> d(n - 1), m(n);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      m[i] = 0.0;
    } else {
      const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
      const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
      m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  // Endpoint slopes limited so the end intervals stay monotone.
  for (std::size_t i : {std::size_t{0}, n - 1}) {
    const double di = d[i == 0 ? 0 : n - 2];
    if (m[i] * di <= 0.0) m[i] = 0.0;
    if (std::abs(m[i]) > 3 * std::abs(di)) m[i] = 3 * di;
  }
  return m;
}

}  // namespace

CoefficientCurve CoefficientCurve::constant(double c) { return CoefficientCurve(Constant{c}); }

CoefficientCurve CoefficientCurve::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  return CoefficientCurve(Polynomial{std::move(coeffs)});
}

CoefficientCurve CoefficientCurve::sinusoid(double a, double omega, double phi, double c) {
  return CoefficientCurve(Sinusoid{a, omega, phi, c});
}

CoefficientCurve CoefficientCurve::tabulated(std::vector<double> t, std::vector<double> y) {
  if (t.size() < 2 || t.size() != y.size()) {
    throw InvalidArgument("tabulated curve needs >= 2 samples of matching length");
  }
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (!(t[i + 1] > t[i])) throw InvalidArgument("tabulated curve times must increase strictly");
  }
  std::vector<double> slope = monotone_slopes(t, y);
  CoefficientCurve c(Tabulated{std::move(t), std::move(y), std::move(slope)});
  const auto& tab = std::get<Tabulated>(c.form_);
  c.t_min_ = tab.t.front();
  c.t_max_ = tab.t.back();
  return c;
}

bool CoefficientCurve::is_constant() const {
  if (std::holds_alternative<Constant>(form_)) return true;
  if (const auto* p = std::get_if<Polynomial>(&form_)) {
    return std::all_of(p->coeffs.begin() + 1, p->coeffs.end(), [](double c) { return c == 0.0; });
  }
  if (const auto* s = std::get_if<Sinusoid>(&form_)) return s->a == 0.0 || s->omega == 0.0;
  return false;
}

double CoefficientCurve::operator()(double t) const {
  if (t < t_min_ || t > t_max_) {
    throw DomainError("coefficient curve evaluated at t = " + shortest(t) + " outside [" +
                      shortest(t_min_) + ", " + shortest(t_max_) + "]");
  }
  return std::visit(
      [t](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Constant>) {
          return f.c;
        } else if constexpr (std::is_same_v<F, Polynomial>) {
          double s = 0.0;
          for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) s = s * t + *it;
          return s;
        } else if constexpr (std::is_same_v<F, Sinusoid>) {
          return f.a * std::cos(f.omega * t + f.phi) + f.c;
        } else {
          auto hi = std::upper_bound(f.t.begin(), f.t.end(), t);
          std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(hi - f.t.begin(), 1),
                                                f.t.size() - 1) - 1;
          const double h = f.t[i + 1] - f.t[i];
          const double s = (t - f.t[i]) / h;
          const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
          const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
          return h00 * f.y[i] + h10 * h * f.slope[i] + h01 * f.y[i + 1] + h11 * h * f.slope[i + 1];
        }
      },
      form_);
}

namespace {

// Appends "c*factor" to a signed sum, dropping unit coefficients.
void append_term(std::string& out, double c, const std::string& factor) {
  if (c == 0.0) return;
  const bool neg = c < 0.0;
  const double a = std::abs(c);
  std::string term;
  if (factor.empty()) {
    term = shortest(a);
  } else {
    term = a == 1.0 ? factor : shortest(a) + "*" + factor;
  }
  if (out.empty()) {
    out = neg ? "-" + term : term;
  } else {
    out += (neg ? "-" : "+") + term;
  }
}

}  // namespace

std::string CoefficientCurve::describe() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using F = std::decay_t<decltype(f)>;
        std::string s;
        if constexpr (std::is_same_v<F, Constant>) {
          return shortest(f.c);
        } else if constexpr (std::is_same_v<F, Polynomial>) {
          for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
            const std::string factor = k == 0 ? "" : k == 1 ? "t" : "t^" + std::to_string(k);
            append_term(s, f.coeffs[k], factor);
          }
        } else if constexpr (std::is_same_v<F, Sinusoid>) {
          append_term(s, f.c, "");
          std::string arg = "cos";
          if (f.omega != 1.0 || f.phi != 0.0) {
            arg = "cos(" + (f.omega == 1.0 ? std::string("t") : shortest(f.omega) + "*t");
            if (f.phi != 0.0) arg += (f.phi < 0.0 ? "-" : "+") + shortest(std::abs(f.phi));
            arg += ")";
          }
          append_term(s, f.a, arg);
        } else {
          return "tabulated[" + std::to_string(f.t.size()) + "]";
        }
        return s.empty() ? "0" : s;
      },
      form_);
}

namespace {

class CurveParser {
 public:
  explicit CurveParser(std::string_view s) : s_(s) {}

  CoefficientCurve parse() {
    skip_ws();
    if (pos_ == s_.size()) fail("empty expression");
    bool first = true;
    while (pos_ < s_.size()) {
      double sign = 1.0;
      if (accept('+')) {
      } else if (accept('-')) {
        sign = -1.0;
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      term(sign);
      skip_ws();
    }
    return build();
  }

 private:
  struct Trig {
    double amp, omega, phi;  // amp * cos(omega t + phi)
  };

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("coefficient curve '" + std::string(s_) + "': " + msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_word(std::string_view w) {
    skip_ws();
    if (s_.substr(pos_, w.size()) == w) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  bool peek_number() {
    skip_ws();
    return pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
  }

  double number() {
    skip_ws();
    double v = 0.0;
    auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (res.ec != std::errc()) fail("expected a number");
    pos_ = res.ptr - s_.data();
    if (accept_word("pi")) v *= std::numbers::pi;
    return v;
  }

  void term(double sign) {
    double factor = sign;
    if (peek_number()) {
      factor *= number();
      if (!accept('*')) {
        add_power(0, factor);
        return;
      }
    }
    if (accept_word("cos")) {
      trig(factor, 0.0);
    } else if (accept_word("sin")) {
      trig(factor, -std::numbers::pi / 2);
    } else if (accept_word("t")) {
      int k = 1;
      if (accept('^')) k = static_cast<int>(number());
      if (k < 0) fail("negative power of t");
      add_power(k, factor);
    } else if (accept_word("pi")) {
      add_power(0, factor * std::numbers::pi);
    } else {
      fail("unexpected input at position " + std::to_string(pos_));
    }
  }

  void trig(double amp, double shift) {
    double omega = 1.0, phi = 0.0;
    if (accept('(')) {
      if (peek_number()) {
        omega = number();
        accept('*');
      }
      if (!accept_word("t")) fail("trigonometric argument must be linear in t");
      if (accept('+')) {
        phi = number();
      } else if (accept('-')) {
        phi = -number();
      }
      if (!accept(')')) fail("expected ')'");
    }
    trig_.push_back({amp, omega, phi + shift});
  }

  void add_power(int k, double c) { powers_[k] += c; }

  CoefficientCurve build() {
    const double c0 = powers_.count(0) ? powers_[0] : 0.0;
    const bool has_t = std::any_of(powers_.begin(), powers_.end(),
                                   [](const auto& kv) { return kv.first > 0; });
    if (trig_.size() > 1) fail("at most one trigonometric term is supported");
    if (trig_.size() == 1) {
      if (has_t) fail("cannot mix trigonometric terms with powers of t");
      return CoefficientCurve::sinusoid(trig_[0].amp, trig_[0].omega, trig_[0].phi, c0);
    }
    if (!has_t) return CoefficientCurve::constant(c0);
    std::vector<double> coeffs(powers_.rbegin()->first + 1, 0.0);
    for (const auto& [k, c] : powers_) coeffs[k] += c;
    return CoefficientCurve::polynomial(std::move(coeffs));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::map<int, double> powers_;
  std::vector<Trig> trig_;
};

}  // namespace

CoefficientCurve parse_curve(std::string_view text) { return CurveParser(text).parse(); }

}  // namespace lhk
