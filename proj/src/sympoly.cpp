#include "lhk/sympoly.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "exact_linalg.hpp"
#include "lhk/error.hpp"

namespace lhk {

namespace {

int total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

void require_same_shape(const SymPoly& p, const SymPoly& q, const char* op) {
  if (p.r() != q.r() || p.m() != q.m()) {
    throw ShapeError(std::string(op) + ": shape mismatch (r=" + std::to_string(p.r()) +
                     ", m=" + std::to_string(p.m()) + ") vs (r=" + std::to_string(q.r()) +
                     ", m=" + std::to_string(q.m()) + ")");
  }
}

}  // namespace

bool GradedLex::operator()(const Exponents& lhs, const Exponents& rhs) const {
  const int dl = total_degree(lhs);
  const int dr = total_degree(rhs);
  if (dl != dr) return dl < dr;
  return lhs < rhs;
}

SymPoly::SymPoly(int r, int m) : r_(r), m_(m) {
  if (r < 1 || m < 1) throw ShapeError("SymPoly needs r >= 1 and m >= 1");
}

SymPoly SymPoly::constant(int r, int m, const Rational& value) {
  SymPoly p(r, m);
  p.add_term(Exponents(static_cast<std::size_t>(r) * m, 0), value);
  return p;
}

SymPoly SymPoly::generator(int r, int m, int alpha, int copy) {
  if (alpha < 0 || alpha >= r || copy < 0 || copy >= m) {
    throw ShapeError("generator index out of range");
  }
  SymPoly p(r, m);
  Exponents e(static_cast<std::size_t>(r) * m, 0);
  e[copy * r + alpha] = 1;
  p.add_term(e, 1);
  return p;
}

int SymPoly::degree() const {
  return terms_.empty() ? -1 : total_degree(terms_.rbegin()->first);
}

Rational SymPoly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

SymPoly& SymPoly::add_term(const Exponents& e, const Rational& coeff) {
  if (static_cast<int>(e.size()) != r_ * m_) {
    throw ShapeError("exponent vector length " + std::to_string(e.size()) + " != m*r = " +
                     std::to_string(r_ * m_));
  }
  if (sgn(coeff) == 0) return *this;
  auto [it, inserted] = terms_.try_emplace(e, coeff);
  if (!inserted) {
    it->second += coeff;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
  return *this;
}

SymPoly SymPoly::derivative(int alpha, int copy) const {
  const int slot = copy * r_ + alpha;
  SymPoly out(r_, m_);
  for (const auto& [e, c] : terms_) {
    if (e[slot] == 0) continue;
    Exponents d = e;
    --d[slot];
    out.terms_.emplace_hint(out.terms_.end(), std::move(d), c * e[slot]);
  }
  return out;
}

double SymPoly::evaluate(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != r_ * m_) {
    throw ShapeError("evaluate: expected " + std::to_string(r_ * m_) + " slot values");
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c.get_d();
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (int k = 0; k < e[i]; ++k) t *= values[i];
    }
    sum += t;
  }
  return sum;
}

SymPoly operator+(const SymPoly& p, const SymPoly& q) {
  require_same_shape(p, q, "add");
  SymPoly out = p;
  for (const auto& [e, c] : q.terms_) out.add_term(e, c);
  return out;
}

SymPoly operator-(const SymPoly& p) {
  SymPoly out = p;
  for (auto& [e, c] : out.terms_) c = -c;
  return out;
}

SymPoly operator-(const SymPoly& p, const SymPoly& q) { return p + (-q); }

SymPoly operator*(const SymPoly& p, const SymPoly& q) {
  require_same_shape(p, q, "mul");
  SymPoly out(p.r_, p.m_);
  Exponents e(p.r_ * p.m_);
  for (const auto& [ep, cp] : p.terms_) {
    for (const auto& [eq, cq] : q.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ep[i] + eq[i];
      out.add_term(e, cp * cq);
    }
  }
  return out;
}

SymPoly operator*(const Rational& s, const SymPoly& p) {
  SymPoly out(p.r_, p.m_);
  if (sgn(s) == 0) return out;
  out.terms_ = p.terms_;
  for (auto& [e, c] : out.terms_) c *= s;
  return out;
}

SymPoly add(const SymPoly& p, const SymPoly& q) { return p + q; }
SymPoly mul(const SymPoly& p, const SymPoly& q) { return p * q; }
SymPoly scale(const SymPoly& p, const Rational& s) { return s * p; }

SymPoly pow(const SymPoly& p, unsigned k) {
  SymPoly out = SymPoly::constant(p.r(), p.m(), 1);
  SymPoly base = p;
  while (k) {
    if (k & 1u) out = out * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return out;
}

SymPoly poisson_bracket(const SymPoly& p, const SymPoly& q, const StructureConstants& sc) {
  require_same_shape(p, q, "poisson_bracket");
  const int r = p.r();
  if (sc.dim() != r) {
    throw ShapeError("poisson_bracket: algebra dimension " + std::to_string(sc.dim()) +
                     " != generator count " + std::to_string(r));
  }
  SymPoly out(r, p.m());
  if (p.degree() < 1 || q.degree() < 1) return out;

  for (int a = 0; a < p.m(); ++a) {
    std::vector<SymPoly> dp, dq;
    dp.reserve(r);
    dq.reserve(r);
    for (int al = 0; al < r; ++al) {
      dp.push_back(p.derivative(al, a));
      dq.push_back(q.derivative(al, a));
    }
    for (int al = 0; al < r; ++al) {
      if (dp[al].is_zero()) continue;
      for (int be = 0; be < r; ++be) {
        if (dq[be].is_zero()) continue;
        SymPoly lin(r, p.m());
        for (int ga = 0; ga < r; ++ga) {
          if (sgn(sc(al, be, ga)) == 0) continue;
          Exponents e(static_cast<std::size_t>(r) * p.m(), 0);
          e[a * r + ga] = 1;
          lin.add_term(e, sc(al, be, ga));
        }
        if (lin.is_zero()) continue;
        out = out + lin * (dp[al] * dq[be]);
      }
    }
  }
  return out;
}

SymPoly coproduct(const SymPoly& p, int m_target) {
  if (p.m() != 1) throw ShapeError("coproduct: input must live in one copy (m = 1)");
  if (m_target < 1) throw InvalidArgument("coproduct: target copy count must be >= 1");
  const int r = p.r();
  std::vector<SymPoly> sums;
  for (int al = 0; al < r; ++al) {
    SymPoly s(r, m_target);
    for (int a = 0; a < m_target; ++a) s = s + SymPoly::generator(r, m_target, al, a);
    sums.push_back(std::move(s));
  }
  // Powers are memoized per generator since terms share them heavily.
  std::vector<std::vector<SymPoly>> powers(r);
  auto power_of = [&](int al, int k) -> const SymPoly& {
    auto& cache = powers[al];
    if (cache.empty()) cache.push_back(SymPoly::constant(r, m_target, 1));
    while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * sums[al]);
    return cache[k];
  };
  SymPoly out(r, m_target);
  for (const auto& [e, c] : p.terms()) {
    SymPoly term = SymPoly::constant(r, m_target, c);
    for (int al = 0; al < r; ++al) {
      if (e[al]) term = term * power_of(al, e[al]);
    }
    out = out + term;
  }
  return out;
}

SymPoly embed(const SymPoly& p, int m) {
  if (m < p.m()) throw ShapeError("embed: target copy count smaller than source");
  SymPoly out(p.r(), m);
  Exponents e(static_cast<std::size_t>(p.r()) * m, 0);
  for (const auto& [ep, c] : p.terms()) {
    std::copy(ep.begin(), ep.end(), e.begin());
    out.add_term(e, c);
  }
  return out;
}

std::vector<int> transposition(int m, int i, int j) {
  if (i < 0 || j < 0 || i >= m || j >= m) throw InvalidArgument("transposition out of range");
  std::vector<int> s(m);
  std::iota(s.begin(), s.end(), 0);
  std::swap(s[i], s[j]);
  return s;
}

SymPoly permute_copies(const SymPoly& p, std::span<const int> sigma) {
  const int m = p.m();
  const int r = p.r();
  if (static_cast<int>(sigma.size()) != m) {
    throw InvalidArgument("permutation length " + std::to_string(sigma.size()) +
                          " != copy count " + std::to_string(m));
  }
  std::vector<bool> seen(m, false);
  for (int s : sigma) {
    if (s < 0 || s >= m || seen[s]) throw InvalidArgument("not a permutation of copies");
    seen[s] = true;
  }
  SymPoly out(r, m);
  Exponents e(static_cast<std::size_t>(r) * m);
  for (const auto& [ep, c] : p.terms()) {
    for (int a = 0; a < m; ++a) {
      for (int al = 0; al < r; ++al) e[sigma[a] * r + al] = ep[a * r + al];
    }
    out.add_term(e, c);
  }
  return out;
}

bool is_casimir(const SymPoly& p, const StructureConstants& sc) {
  for (int al = 0; al < p.r(); ++al) {
    if (!poisson_bracket(p, SymPoly::generator(p.r(), p.m(), al, 0), sc).is_zero()) {
      return false;
    }
  }
  return true;
}

std::vector<Exponents> monomials_of_degree(int n, int d) {
  std::vector<Exponents> out;
  Exponents e(n, 0);
  // Enumerate compositions of d into n parts in lexicographic order.
  auto rec = [&](auto&& self, int slot, int left) -> void {
    if (slot == n - 1) {
      e[slot] = static_cast<std::uint16_t>(left);
      out.push_back(e);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[slot] = static_cast<std::uint16_t>(k);
      self(self, slot + 1, left - k);
    }
  };
  if (n > 0) rec(rec, 0, d);
  return out;
}

namespace {

double binomial_saturating(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

SymPoly primitive_integer(SymPoly p) {
  mpz_class lcm_den = 1, gcd_num = 0;
  for (const auto& [e, c] : p.terms()) {
    mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den_mpz_t());
    mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), c.get_num_mpz_t());
  }
  if (p.is_zero()) return p;
  Rational f(lcm_den, gcd_num);
  f.canonicalize();
  if (sgn(p.terms().rbegin()->second) < 0) f = -f;
  return f * p;
}

}  // namespace

CasimirBasis find_casimirs(const StructureConstants& sc, int dmax, std::size_t cap) {
  if (dmax < 0) throw InvalidArgument("dmax must be >= 0");
  const int r = sc.dim();
  const double count = binomial_saturating(r + dmax, dmax);
  if (count > static_cast<double>(cap)) {
    throw SizeError("find_casimirs: " + std::to_string(static_cast<long long>(count)) +
                    " monomials of degree <= " + std::to_string(dmax) + " exceed cap " +
                    std::to_string(cap));
  }
  CasimirBasis basis;
  basis.dmax = dmax;
  // The bracket with a generator preserves homogeneous degree, so each degree
  // is an independent linear system.
  for (int d = 1; d <= dmax; ++d) {
    const std::vector<Exponents> monos = monomials_of_degree(r, d);
    const int ncols = static_cast<int>(monos.size());
    std::map<std::pair<int, Exponents>, std::size_t> row_index;
    std::vector<detail::RationalRow> rows;
    for (int col = 0; col < ncols; ++col) {
      SymPoly mono(r, 1);
      mono.add_term(monos[col], 1);
      for (int al = 0; al < r; ++al) {
        const SymPoly b = poisson_bracket(mono, SymPoly::generator(r, 1, al), sc);
        for (const auto& [e, c] : b.terms()) {
          auto [it, inserted] = row_index.try_emplace({al, e}, rows.size());
          if (inserted) rows.emplace_back(ncols);
          rows[it->second][col] += c;
        }
      }
    }
    for (const auto& v : detail::kernel(std::move(rows), ncols)) {
      SymPoly p(r, 1);
      for (int col = 0; col < ncols; ++col) p.add_term(monos[col], v[col]);
      basis.invariants.push_back(primitive_integer(std::move(p)));
    }
  }
  return basis;
}

std::string to_string(const SymPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << c.get_str();
    for (int a = 0; a < p.m(); ++a) {
      for (int al = 0; al < p.r(); ++al) {
        const int k = e[a * p.r() + al];
        if (!k) continue;
        os << " * v" << (al + 1) << '_' << (a + 1);
        if (k > 1) os << '^' << k;
      }
    }
  }
  return os.str();
}

namespace {

// Parsed generators are recorded as (alpha, copy) pairs; the final copy count
// is only known at the end, so parsing builds polynomials over `max_m` copies
// and trims afterwards.
class PolyParser {
 public:
  PolyParser(std::string_view text, int r, int m) : s_(text), r_(r), m_(m) {}

  SymPoly parse() {
    SymPoly p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("polynomial: " + msg + " at position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char ch) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string digits() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected digits");
    return std::string(s_.substr(start, pos_ - start));
  }

  SymPoly expr() {
    SymPoly p = term();
    for (;;) {
      if (accept('+')) {
        p = p + term();
      } else if (accept('-')) {
        p = p - term();
      } else {
        return p;
      }
    }
  }

  SymPoly term() {
    SymPoly p = unary();
    while (accept('*')) p = p * unary();
    return p;
  }

  SymPoly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    SymPoly base = primary();
    if (accept('^')) {
      const std::string k = digits();
      if (k.size() > 4) fail("exponent too large");
      base = pow(base, static_cast<unsigned>(std::stoul(k)));
    }
    return base;
  }

  SymPoly primary() {
    skip_ws();
    if (accept('(')) {
      SymPoly p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (pos_ < s_.size() && s_[pos_] == 'v') {
      ++pos_;
      const int alpha = std::stoi(digits());
      int copy = 1;
      if (pos_ < s_.size() && s_[pos_] == '_') {
        ++pos_;
        copy = std::stoi(digits());
      }
      if (alpha < 1 || alpha > r_) fail("generator v" + std::to_string(alpha) + " outside 1.." + std::to_string(r_));
      if (copy < 1 || copy > m_) fail("copy index " + std::to_string(copy) + " outside 1.." + std::to_string(m_));
      return SymPoly::generator(r_, m_, alpha - 1, copy - 1);
    }
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      std::string num = digits();
      if (accept('/')) num += "/" + digits();
      return SymPoly::constant(r_, m_, parse_rational(num));
    }
    fail(pos_ < s_.size() ? "unexpected '" + std::string(1, s_[pos_]) + "'" : "unexpected end");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int r_;
  int m_;
};

int max_copy_index(std::string_view text) {
  int best = 1;
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    if (text[i] != '_') continue;
    std::size_t j = i + 1;
    int v = 0;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      v = v * 10 + (text[j] - '0');
      if (v > 1000) break;
      ++j;
    }
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

SymPoly parse_sympoly(std::string_view text, int r, int m) {
  if (r < 1) throw ShapeError("parse_sympoly: r must be >= 1");
  if (m <= 0) m = max_copy_index(text);
  return PolyParser(text, r, m).parse();
}

}  // namespace lhk
