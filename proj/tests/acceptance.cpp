// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "lhk/algebra.hpp"
#include "lhk/dynamics.hpp"
#include "lhk/error.hpp"
#include "lhk/realization.hpp"
#include "lhk/superposition.hpp"
#include "lhk/sympoly.hpp"
#include "lhk/systems.hpp"

using namespace lhk;

namespace {

using Gen = std::mt19937_64;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures while a criterion runs.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok) {
      pass_ = false;
      if (failures_.size() < 5) failures_.push_back(what);
    }
  }
  Outcome done(const std::string& summary) const {
    Outcome o{pass_, summary};
    for (const auto& f : failures_) o.detail += "; FAILED " + f;
    return o;
  }
  int count() const { return count_; }

 private:
  bool pass_ = true;
  int count_ = 0;
  std::vector<std::string> failures_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

SymPoly P(const std::string& text, int r = 3, int m = 1) { return parse_sympoly(text, r, m); }

Rational small_rational(Gen& g) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 3);
  Rational q(num(g), den(g));
  q.canonicalize();
  return q == 0 ? Rational(1) : q;
}

SymPoly random_poly(Gen& g, int r, int dmax) {
  std::uniform_int_distribution<int> nterms(1, 4), deg(0, dmax), slot(0, r - 1);
  SymPoly p(r, 1);
  const int t = nterms(g);
  for (int i = 0; i < t; ++i) {
    Exponents e(static_cast<std::size_t>(r), 0);
    const int d = deg(g);
    for (int k = 0; k < d; ++k) ++e[slot(g)];
    p.add_term(e, small_rational(g));
  }
  return p;
}

// Replaces every generator of copy `split` in a polynomial over m copies by
// the sum of copies split and split+1 of an (m+1)-copy polynomial.
SymPoly split_copy(const SymPoly& p, int split) {
  const int r = p.r(), m = p.m();
  SymPoly out(r, m + 1);
  for (const auto& [e, c] : p.terms()) {
    SymPoly term = SymPoly::constant(r, m + 1, c);
    for (int a = 0; a < m; ++a) {
      for (int al = 0; al < r; ++al) {
        const int k = e[a * r + al];
        if (!k) continue;
        if (a < split) {
          term = term * pow(SymPoly::generator(r, m + 1, al, a), k);
        } else if (a == split) {
          term = term * pow(SymPoly::generator(r, m + 1, al, a) + SymPoly::generator(r, m + 1, al, a + 1), k);
        } else {
          term = term * pow(SymPoly::generator(r, m + 1, al, a + 1), k);
        }
      }
    }
    out = out + term;
  }
  return out;
}

// Exact nullity by Gaussian elimination over Q.
int nullity(std::vector<std::vector<Rational>> rows, int cols) {
  int rank = 0;
  for (int c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    int piv = -1;
    for (int i = rank; i < static_cast<int>(rows.size()); ++i) {
      if (rows[i][c] != 0) {
        piv = i;
        break;
      }
    }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (i == rank || rows[i][c] == 0) continue;
      const Rational f = rows[i][c] / rows[rank][c];
      for (int k = c; k < cols; ++k) rows[i][k] -= f * rows[rank][k];
    }
    ++rank;
  }
  return cols - rank;
}

// Dimension of {P : deg P <= dmax, {P, v_a} = 0 for all a} by bracketing
// every monomial with every generator.
int brute_casimir_dimension(const StructureConstants& sc, int dmax) {
  const int r = sc.dim();
  std::vector<Exponents> monos;
  for (int d = 0; d <= dmax; ++d) {
    for (const auto& e : monomials_of_degree(r, d)) monos.push_back(e);
  }
  std::map<std::pair<Exponents, int>, int> row_of;
  std::vector<std::vector<std::pair<int, Rational>>> cols;
  for (const auto& e : monos) {
    SymPoly mono(r, 1);
    mono.add_term(e, 1);
    std::vector<std::pair<int, Rational>> col;
    for (int a = 0; a < r; ++a) {
      const SymPoly b = poisson_bracket(mono, SymPoly::generator(r, 1, a), sc);
      for (const auto& [ex, c] : b.terms()) {
        const auto it = row_of.try_emplace({ex, a}, static_cast<int>(row_of.size())).first;
        col.emplace_back(it->second, c);
      }
    }
    cols.push_back(std::move(col));
  }
  std::vector<std::vector<Rational>> rows(row_of.size(), std::vector<Rational>(monos.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (const auto& [i, c] : cols[j]) rows[i][j] += c;
  }
  return nullity(rows, static_cast<int>(monos.size()));
}

SystemParams params(std::map<std::string, double> values, std::map<std::string, std::string> curves) {
  SystemParams p;
  p.values = std::move(values);
  for (const auto& [k, v] : curves) p.curves.insert_or_assign(k, parse_curve(v));
  return p;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Check c;
  const auto sl2 = builtin("sl2").sc, su2 = builtin("su2").sc;
  const SymPoly C2 = P("v1*v3 - v2^2"), C3 = P("v1^2 + v2^2 + v3^2");
  c.expect(is_casimir(C2, sl2), "is_casimir(sl2)");
  c.expect(is_casimir(C3, su2), "is_casimir(su2)");
  for (int a = 0; a < 3; ++a) {
    c.expect(poisson_bracket(C2, SymPoly::generator(3, 1, a), sl2).is_zero(), "sl2 bracket");
    c.expect(poisson_bracket(C3, SymPoly::generator(3, 1, a), su2).is_zero(), "su2 bracket");
  }
  return c.done("sl2 and su2 Casimirs bracket to exactly zero with all generators");
}

Outcome criterion2() {
  Check c;
  Gen g(2024);
  int pairs = 0;
  for (const char* name : {"sl2", "h6"}) {
    const auto sc = builtin(name).sc;
    const int r = sc.dim();
    for (int i = 0; i < 200; ++i, ++pairs) {
      const SymPoly p = random_poly(g, r, 3), q = random_poly(g, r, 3), s = random_poly(g, r, 3);
      const std::string tag = std::string(name) + " pair " + std::to_string(i);
      const SymPoly pq = poisson_bracket(p, q, sc);
      c.expect(pq == -poisson_bracket(q, p, sc), "antisymmetry " + tag);
      c.expect(poisson_bracket(p, q * s, sc) == pq * s + q * poisson_bracket(p, s, sc), "Leibniz " + tag);
      const SymPoly jac = poisson_bracket(p, poisson_bracket(q, s, sc), sc) +
                          poisson_bracket(q, poisson_bracket(s, p, sc), sc) +
                          poisson_bracket(s, pq, sc);
      c.expect(jac.is_zero(), "Jacobi " + tag);
      c.expect(coproduct(pq, 2) == poisson_bracket(coproduct(p, 2), coproduct(q, 2), sc),
               "coproduct morphism " + tag);
      c.expect(coproduct(p * q, 2) == coproduct(p, 2) * coproduct(q, 2), "coproduct product " + tag);
      const SymPoly d2 = coproduct(p, 2);
      c.expect(split_copy(d2, 0) == split_copy(d2, 1), "coassociativity " + tag);
      c.expect(split_copy(d2, 1) == coproduct(p, 3), "three-fold coproduct " + tag);
    }
  }
  return c.done(std::to_string(pairs) + " random pairs (degree <= 3, sl2 and h6), " +
                std::to_string(c.count()) + " exact identities");
}

Outcome criterion3() {
  Check c;
  const auto sl2 = builtin("sl2").sc;
  const SymPoly C = P("v1*v3 - v2^2");
  for (int j = 1; j <= 3; ++j) {
    const SymPoly cj = embed(coproduct(C, j), 3);
    for (int a = 0; a < 3; ++a) {
      const SymPoly va = coproduct(SymPoly::generator(3, 1, a), 3);
      c.expect(poisson_bracket(cj, va, sl2).is_zero(),
               "{D^(" + std::to_string(j) + ")(C), D^(3)(v" + std::to_string(a + 1) + ")}");
    }
  }
  c.expect(poisson_bracket(embed(coproduct(C, 2), 3), coproduct(C, 3), sl2).is_zero(),
           "{D^(2)(C), D^(3)(C)}");
  return c.done("Delta^(j)(C), j = 1..3, commute with Delta^(3)(v_a) and F^(2), F^(3) are in involution");
}

Outcome criterion4() {
  Check c;
  Gen g(4);
  int realizations = 0;
  double worst = 0.0;
  for (const auto& name : system_names()) {
    const auto sys = catalog(name);
    if (!sys.realization) continue;
    std::vector<const Realization*> all = {&*sys.realization};
    for (const auto& alt : sys.alternate_realizations) all.push_back(&alt);
    for (const Realization* R : all) {
      const auto rep = check_homomorphism(*R, 100, 1e-8, g);
      ++realizations;
      worst = std::max(worst, rep.max_residual);
      c.expect(rep.pass && rep.samples == 100 && rep.max_residual < 1e-8,
               R->name + " residual " + fmt(rep.max_residual));
    }
  }
  c.expect(realizations == 7, "expected six systems with seven bivectors");
  return c.done(std::to_string(realizations) + " realizations (riccati4 with both bivectors), 100 points each, max residual " +
                fmt(worst));
}

Outcome criterion5() {
  Check c;
  Gen g(5);
  std::ostringstream summary;
  auto run = [&](const std::string& label, const LieSystem& sys, int m,
                 std::vector<NamedInvariant> invs) {
    const Point x0 = sample_point(power(sys.space, m), g, sys.sample_margin);
    const auto tr = integrate(as_ode(prolong(sys, m)), x0, 0.0, 5.0, Rkf45{1e-10, 1e-10});
    const auto rep = monitor_invariants(tr, invs);
    for (const auto& e : rep.entries) c.expect(e.max_drift < 1e-6, label + " " + e.name + " drift " + fmt(e.max_drift));
    summary << label << " " << fmt(rep.max_drift()) << ", ";
  };
  const auto ks = catalog("kummer-schwarz", params({{"b0", 1.0}}, {{"b1", "cos"}}));
  const auto ks_invs = casimir_invariants(ks, 3);
  c.expect(ks_invs.size() == 4, "kummer-schwarz invariant set");
  run("kummer-schwarz", ks, 3, ks_invs);
  const auto sw = catalog("smorodinsky-winternitz", params({{"n", 1.0}, {"b", 1.0}}, {{"omega", "1+0.3*cos"}}));
  run("smorodinsky-winternitz", sw, 3, casimir_invariants(sw, 3));
  const auto erm = catalog("ermakov", params({{"b", 1.0}}, {{"omega", "1+0.3*cos"}}));
  run("ermakov(LR)", erm, 1, {lewis_riesenfeld(1.0)});
  const auto trig = catalog("trig-su2");
  auto trig_invs = casimir_invariants(trig, 3);
  trig_invs.resize(2);  // F^(2), F^(3)
  run("trig-su2", trig, 3, trig_invs);
  std::string s = summary.str();
  s.resize(s.size() - 2);
  return c.done("max relative drift over t in [0,5]: " + s);
}

Outcome criterion6() {
  Check c;
  Gen g(6);
  std::ostringstream summary;
  for (const char* name : {"kummer-schwarz", "smorodinsky-winternitz", "trig-su2"}) {
    const auto sys = catalog(name);
    const auto invs = casimir_invariants(sys, 3);
    const std::vector<SmoothFunction> fs = {invs[0].f, invs[3].f};  // F^(2), F^(2)_{23}
    c.expect(invs[3].name == "F^(2)_{23}", std::string(name) + " invariant naming");
    const PhaseSpace sp = power(sys.space, 3);
    const std::vector<int> wrt = {0, 1};
    double smallest = INFINITY;
    for (int i = 0; i < 20; ++i) {
      const Point pt = sample_point(sp, g, sys.sample_margin);
      const auto rep = independence_check(fs, wrt, pt, sp);
      smallest = std::min(smallest, std::abs(rep.det_normalized));
      c.expect(std::abs(rep.det_normalized) > 1e-6, std::string(name) + " det " + fmt(rep.det_normalized));
    }
    summary << name << " min |det| " << fmt(smallest) << ", ";
  }
  std::string s = summary.str();
  s.resize(s.size() - 2);
  return c.done("20 points each: " + s);
}

Outcome criterion7() {
  Check c;
  std::ostringstream summary;
  auto run = [&](const std::string& label, const LieSystem& sys, double t1, double tol) {
    VerifyOptions o;
    o.t0 = 0.0;
    o.t1 = t1;
    o.grid = 501;
    o.tol = tol;
    const auto rep = verify_rule(sys, sys.rule, o);
    c.expect(rep.pass && rep.max_error < tol, label + " max error " + fmt(rep.max_error));
    summary << label << " " << fmt(rep.max_error) << ", ";
    return rep;
  };
  run("riccati", catalog("riccati", params({}, {{"a0", "sin"}, {"a1", "0.5"}, {"a2", "cos"}})), 2.0, 1e-6);
  run("riccati(const)", catalog("riccati", params({}, {{"a0", "0.3"}, {"a1", "0.5"}, {"a2", "1"}})), 2.0, 1e-6);
  run("KS b0=1", catalog("kummer-schwarz", params({{"b0", 1.0}}, {{"b1", "cos"}})), 5.0, 1e-5);
  run("KS b0=1(const)", catalog("kummer-schwarz", params({{"b0", 1.0}}, {{"b1", "0.7"}})), 5.0, 1e-5);
  // With b0 = 0 every solution reaches x = infinity in finite time
  // (x = 1/y^2 with y'' + b1 y = 0), so the span stops before the first blow-up.
  run("KS b0=0", catalog("kummer-schwarz", params({{"b0", 0.0}}, {{"b1", "cos"}})), 1.5, 1e-5);
  run("KS b0=0(const)", catalog("kummer-schwarz", params({{"b0", 0.0}}, {{"b1", "0.7"}})), 1.5, 1e-5);
  run("MP b=1", catalog("smorodinsky-winternitz", params({{"b", 1.0}}, {{"omega", "1+0.3*cos"}})), 5.0, 1e-5);
  run("MP b=1(const)", catalog("smorodinsky-winternitz", params({{"b", 1.0}}, {{"omega", "1.3"}})), 5.0, 1e-5);
  const auto trig = catalog("trig-su2");
  const auto rep = run("trig-su2", trig, 5.0, 1e-5);
  run("trig-su2(const)", catalog("trig-su2", params({}, {{"Bx", "0.4"}, {"By", "-0.2"}, {"Bz", "1"}})), 5.0, 1e-5);

  // Newton residuals along the trig-su2 run.
  std::vector<double> x0;
  for (const auto& s : rep.initial) x0.insert(x0.end(), s.begin(), s.end());
  const auto tr = integrate(as_ode(prolong(trig, 3)), x0, 0.0, 5.0, Rkf45{});
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); i += std::max<std::size_t>(1, tr.size() / 50)) {
    const auto& s = tr.states[i];
    for (const auto& root : trig_su2_roots(s[2], s[3], s[4], s[5], rep.constants[0], rep.constants[1])) {
      worst = std::max(worst, root.residual);
    }
  }
  c.expect(worst < 1e-10, "trig-su2 Newton residual " + fmt(worst));
  std::string s = summary.str();
  s.resize(s.size() - 2);
  return c.done("max reconstruction error: " + s + "; trig Newton residual " + fmt(worst));
}

Outcome criterion8() {
  Check c;
  const auto sl2 = builtin("sl2").sc;
  const std::vector<double> f0 = {0.7, -0.3, 1.1};
  const std::vector<CoefficientFn> b = {[](double) { return 0.0; }, [](double) { return 0.0; },
                                        [](double) { return 1.0; }};
  const auto path = lie_integral_flow(sl2, b, f0, 0.0, 3.0, Rkf45{});
  double worst = 0.0;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double t = path.times[i];
    const double exact[3] = {f0[0], f0[1] + 2 * f0[0] * t, f0[2] + f0[1] * t + f0[0] * t * t};
    for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(path.f[i][a] - exact[a]));
  }
  c.expect(worst < 1e-9, "sl2 closed form error " + fmt(worst));

  bool constant = true;
  const std::vector<CoefficientFn> rb = {[](double t) { return std::sin(t); }, [](double t) { return t * t; },
                                         [](double) { return -1.0; }};
  for (int r : {1, 3, 5}) {
    std::vector<double> g0(r);
    for (int a = 0; a < r; ++a) g0[a] = 0.5 * a - 1.0;
    std::vector<CoefficientFn> coeff(rb.begin(), rb.begin() + std::min(r, 3));
    while (static_cast<int>(coeff.size()) < r) coeff.push_back([](double t) { return std::cos(t); });
    const auto flat = lie_integral_flow(abelian(r), coeff, g0, 0.0, 3.0, Rkf45{});
    for (const auto& f : flat.f) constant = constant && f == g0;
  }
  c.expect(constant, "Abelian paths are exactly constant");

  const auto sw = catalog("smorodinsky-winternitz", params({{"n", 1.0}, {"b", 1.0}}, {{"omega", "1+0.3*cos"}}));
  const std::vector<double> x0 = {1.1, 0.2}, g0 = {0.3, -0.4, 1.0};
  const auto tr = integrate(as_ode(sw), x0, 0.0, 5.0, Rkf45{});
  const auto lp = lie_integral_flow(sw.sc, sw.b, g0, 0.0, 5.0, Rkf45{}, tr.times);
  const auto rep = verify_lie_integral(sw, lp, tr, 1e-6);
  c.expect(rep.pass, "SW lie integral drift " + fmt(rep.max_drift));
  return c.done("sl2 closed-form error " + fmt(worst) + ", Abelian constant, SW drift " + fmt(rep.max_drift));
}

Outcome criterion9() {
  Check c;
  const auto sl2 = builtin("sl2").sc;
  const auto b = find_casimirs(sl2, 2);
  c.expect(b.dimension() == 2, "sl2 dimension " + std::to_string(b.dimension()));
  const SymPoly C = P("v1*v3 - v2^2");
  c.expect(b.invariants.size() == 1 && (b.invariants[0] == C || b.invariants[0] == -C),
           "sl2 invariant is the Casimir");
  const auto h6 = builtin("h6").sc;
  const auto b6 = find_casimirs(h6, 1);
  const SymPoly v6 = SymPoly::generator(6, 1, 5);
  bool has_v6 = false;
  for (const auto& p : b6.invariants) has_v6 = has_v6 || p == v6 || p == -v6;
  c.expect(has_v6, "h6 basis contains v6");

  std::ostringstream dims;
  const std::vector<std::pair<std::string, int>> cases = {{"sl2", 2}, {"sl2", 4}, {"su2", 3}, {"h6", 1}, {"h6", 2}};
  for (const auto& [name, d] : cases) {
    const auto sc = builtin(name).sc;
    const auto basis = find_casimirs(sc, d);
    const int brute = brute_casimir_dimension(sc, d);
    c.expect(basis.dimension() == brute, name + " dmax " + std::to_string(d) + " solver " +
                                              std::to_string(basis.dimension()) + " vs brute " +
                                              std::to_string(brute));
    for (const auto& p : basis.invariants) c.expect(is_casimir(p, sc), name + " basis element");
    dims << name << "/" << d << "=" << basis.dimension() << " ";
  }
  std::string s = dims.str();
  s.pop_back();
  return c.done("solver dimensions match brute-force bracketing: " + s);
}

Outcome criterion10() {
  Check c;
  SystemParams p = params({{"b", 0.0}}, {{"omega", "1"}});
  const auto osc = as_ode(catalog("smorodinsky-winternitz", p));
  const std::vector<double> x0 = {1.0, 0.0};
  auto err = [&](double h) {
    const auto tr = integrate(osc, x0, 0.0, 2.0, Rk4{h});
    const auto& s = tr.states.back();
    return std::hypot(s[0] - std::cos(2.0), s[1] + std::sin(2.0));
  };
  const double factor = err(0.02) / err(0.01);
  c.expect(factor >= 12.0 && factor <= 20.0, "RK4 factor " + fmt(factor));

  const auto ks = catalog("kummer-schwarz", params({{"b0", 1.0}}, {{"b1", "cos"}}));
  const auto invs = casimir_invariants(ks, 2);
  const std::vector<double> y0 = {1.0, 0.2, 0.8, -0.1};
  auto drift = [&](double tol) {
    const auto tr = integrate(as_ode(prolong(ks, 2)), y0, 0.0, 5.0, Rkf45{tol, tol});
    return monitor_invariants(tr, invs).max_drift();
  };
  const double loose = drift(1e-6), tight = drift(1e-8);
  c.expect(loose >= 10.0 * tight, "rkf45 drift " + fmt(loose) + " -> " + fmt(tight));
  return c.done("RK4 halving factor " + fmt(factor) + ", rkf45 drift " + fmt(loose) + " -> " + fmt(tight) +
                " (ratio " + fmt(loose / tight) + ")");
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu: %s - %s [%.2fs]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
