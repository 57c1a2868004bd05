#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lhk/dynamics.hpp"
#include "lhk/error.hpp"
#include "lhk/superposition.hpp"
#include "lhk/systems.hpp"
#include "support.hpp"

using namespace lhk;

namespace {

LieSystem oscillator(double w) {
  SystemParams p;
  p.values["b"] = 0.0;
  p.curves.insert_or_assign("omega", CoefficientCurve::constant(w));
  return catalog("smorodinsky-winternitz", p);
}

LieSystem riccati_const(double a0, double a1, double a2) {
  SystemParams p;
  p.curves.insert_or_assign("a0", CoefficientCurve::constant(a0));
  p.curves.insert_or_assign("a1", CoefficientCurve::constant(a1));
  p.curves.insert_or_assign("a2", CoefficientCurve::constant(a2));
  return catalog("riccati", p);
}

// Hand-expanded F^(2) = (h1 + h1')(h3 + h3') - (h2 + h2')^2 for kummer-schwarz.
double ks_f2_by_hand(double x1, double p1, double x2, double p2, double b0) {
  auto h1 = [](double x) { return 4 / x; };
  auto h2 = [](double x, double p) { return x * p; };
  auto h3 = [b0](double x, double p) { return (p * p * x * x * x + b0 * x) / 4; };
  const double s2 = h2(x1, p1) + h2(x2, p2);
  return (h1(x1) + h1(x2)) * (h3(x1, p1) + h3(x2, p2)) - s2 * s2;
}

double end_error(double h) {
  const auto sys = prolong(oscillator(1.0), 1);
  const std::vector<double> x0 = {1.0, 0.0};
  const auto tr = integrate(as_ode(sys), x0, 0.0, 2.0, Rk4{h});
  return std::abs(tr.states.back()[0] - std::cos(2.0)) + std::abs(tr.states.back()[1] + std::sin(2.0));
}

}  // namespace

TEST_CASE("rk4 returns to the start after one oscillator period") {
  const auto sys = prolong(oscillator(1.0), 1);
  const std::vector<double> x0 = {0.8, -0.1};
  const double T = 2 * std::numbers::pi;
  const auto tr = integrate(as_ode(sys), x0, 0.0, T, Rk4{1e-3});
  CHECK(tr.times.back() == doctest::Approx(T).epsilon(1e-15));
  CHECK(std::abs(tr.states.back()[0] - 0.8) < 1e-8);
  CHECK(std::abs(tr.states.back()[1] + 0.1) < 1e-8);
  CHECK(tr.times.front() == 0.0);
  for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
}

TEST_CASE("blow-up of dx/dt = x^2 is reported before t = 1") {
  const auto sys = as_ode(riccati_const(0, 0, 1));
  const std::vector<double> x0 = {1.0};
  bool raised = false;
  try {
    integrate(sys, x0, 0.0, 2.0, Rkf45{});
  } catch (const DomainExitError& e) {
    raised = true;
    CHECK(e.time() < 1.0);
    CHECK(e.time() > 0.99);
    REQUIRE(e.last_state().size() == 1);
    CHECK(e.last_state()[0] > 1e3);
  } catch (const StepUnderflowError&) {
    raised = true;
  }
  CHECK(raised);
  const auto tr = integrate(sys, x0, 0.0, 0.9, Rkf45{});
  CHECK(tr.states.back()[0] == doctest::Approx(10.0).epsilon(1e-8));
}

TEST_CASE("zero field keeps the state fixed and start outside the domain throws") {
  const auto sys = as_ode(riccati_const(0, 0, 0));
  const std::vector<double> x0 = {0.3};
  const auto tr = integrate(sys, x0, 0.0, 4.0, Rkf45{});
  for (const auto& s : tr.states) CHECK(s[0] == 0.3);
  const auto ks = as_ode(catalog("kummer-schwarz"));
  const std::vector<double> bad = {0.0, 1.0};
  CHECK_THROWS_AS(integrate(ks, bad, 0.0, 1.0, Rkf45{}), DomainError);
}

TEST_CASE("stops land on the grid and CSV output is well formed") {
  const auto sys = as_ode(prolong(oscillator(1.0), 2));
  const std::vector<double> x0 = {1, 0, 0, 1};
  const std::vector<double> stops = {0.25, 0.5, 1.0 / 3.0};
  const auto tr = integrate(sys, x0, 0.0, 1.0, Rkf45{}, stops);
  for (double s : stops) CHECK(std::find(tr.times.begin(), tr.times.end(), s) != tr.times.end());
  CHECK(tr.at(0.5)[0] == doctest::Approx(std::cos(0.5)).epsilon(1e-9));
  CHECK_THROWS_AS(tr.at(1.5), GridMismatchError);
  CHECK(tr.copy(0, 1) == std::vector<double>{0, 1});

  std::ostringstream os;
  write_csv(tr, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,x_1,p_1,x_2,p_2");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(rows == tr.size());
}

TEST_CASE("rk4 is fourth order and rkf45 follows its tolerance") {
  const double e1 = end_error(0.02), e2 = end_error(0.01);
  const double factor = e1 / e2;
  CHECK(factor >= 12.0);
  CHECK(factor <= 20.0);

  const auto ks = catalog("kummer-schwarz");
  const auto sys = prolong(ks, 1);
  const std::vector<double> x0 = {1.0, 0.3};
  auto drift = [&](double tol) {
    const auto tr = integrate(as_ode(sys), x0, 0.0, 5.0, Rkf45{tol, tol});
    const double e = std::abs(tr.states.back()[0] - integrate(as_ode(sys), x0, 0.0, 5.0, Rkf45{1e-13, 1e-13}).states.back()[0]);
    return e;
  };
  CHECK(drift(1e-6) >= 10.0 * drift(1e-8));
}

TEST_CASE("kummer-schwarz invariants stay constant for three copies") {
  const auto ks = catalog("kummer-schwarz");
  const auto invs = casimir_invariants(ks, 3);
  std::vector<std::string> names;
  for (const auto& f : invs) names.push_back(f.name);
  CHECK(names == std::vector<std::string>{"F^(2)", "F^(3)", "F^(2)_{13}", "F^(2)_{23}"});

  testing::Gen g(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Point s = sample_point(power(ks.space, 2), g);
    CHECK(realized("F2", embed(coproduct(*ks.casimir, 2), 2), *ks.realization).f(s) ==
          doctest::Approx(ks_f2_by_hand(s[0], s[1], s[2], s[3], 1.0)));
    CHECK(kummer_schwarz_f2(s[0], s[1], s[2], s[3], 1.0) ==
          doctest::Approx(ks_f2_by_hand(s[0], s[1], s[2], s[3], 1.0)));
  }

  const std::vector<double> x0 = {1.0, 0.2, 0.8, -0.1, 1.2, 0.05};
  const auto tr = integrate(as_ode(prolong(ks, 3)), x0, 0.0, 5.0, Rkf45{});
  const auto rep = monitor_invariants(tr, invs);
  REQUIRE(rep.entries.size() == 4);
  for (const auto& e : rep.entries) {
    INFO(e.name);
    CHECK(e.max_drift < 1e-6);
    CHECK(e.samples == tr.size());
  }

  const auto single = casimir_invariants(ks, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0].name == "F");
  const std::vector<double> one = {0.7, 0.4};
  CHECK(single[0].f(one) == doctest::Approx(1.0));
}

TEST_CASE("property: copy permutations permute the invariants") {
  const auto ks = catalog("kummer-schwarz");
  const auto invs = casimir_invariants(ks, 3);
  testing::Gen g(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Point s = sample_point(power(ks.space, 3), g);
    // F^(2)_{13}(s) = F^(2)(s with copies 1 and 3 swapped); F^(3) is symmetric.
    Point sw = s;
    std::swap(sw[0], sw[4]);
    std::swap(sw[1], sw[5]);
    CHECK(invs[2].f(s) == doctest::Approx(invs[0].f(sw)));
    CHECK(invs[1].f(s) == doctest::Approx(invs[1].f(sw)));
  }
}

TEST_CASE("ermakov Lewis-Riesenfeld invariant") {
  SystemParams p;
  p.values["b"] = 0.7;
  p.curves.insert_or_assign("omega", parse_curve("1+t^2"));
  const auto sys = catalog("ermakov", p);
  const std::vector<double> x0 = {1.0, 0.5, 0.1, -0.2};
  const auto tr = integrate(as_ode(sys), x0, 0.0, 2.0, Rkf45{});
  const auto rep = monitor_invariants(tr, {lewis_riesenfeld(0.7), casimir_invariants(sys, 1)[0]});
  CHECK(rep.entries[0].max_drift < 1e-6);
  CHECK(rep.entries[1].max_drift < 1e-6);
  // The realized Casimir is a quarter of the Lewis-Riesenfeld value.
  CHECK(casimir_invariants(sys, 1)[0].f(x0) == doctest::Approx(lewis_riesenfeld(0.7).f(x0) / 4));
}

TEST_CASE("involution and independence checks") {
  const auto ks = catalog("kummer-schwarz");
  const SymPoly& C = *ks.casimir;
  testing::Gen g(3);
  const auto good = involution_check(embed(coproduct(C, 2), 3), coproduct(C, 3), *ks.realization,
                                     50, 1e-8, g);
  CHECK(good.pass);
  CHECK(good.samples == 50);
  CHECK(good.max_abs < 1e-8);

  const auto v1 = parse_sympoly("v1", 3, 1);
  const auto v2 = parse_sympoly("v2", 3, 1);
  const auto bad = involution_check(v1, v2, *ks.realization, 10, 1e-8, g);
  CHECK_FALSE(bad.pass);

  const auto invs = casimir_invariants(ks, 3);
  const std::vector<SmoothFunction> fs = {invs[0].f, invs[3].f};
  const std::vector<int> wrt = {0, 1};
  const PhaseSpace sp = power(ks.space, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const Point s = sample_point(sp, g);
    const auto rep = independence_check(fs, wrt, s, sp);
    CHECK(rep.rank == 2);
    CHECK(std::abs(rep.det_normalized) > 1e-6);
  }
  // F^(2) with itself is dependent.
  const std::vector<SmoothFunction> same = {invs[0].f, invs[0].f};
  const Point s = sample_point(sp, g);
  CHECK(independence_check(same, wrt, s, sp).rank == 1);
}

TEST_CASE("lie integral flow") {
  const auto sl2 = builtin("sl2").sc;
  const std::vector<CoefficientFn> b = {[](double) { return 0.0; }, [](double) { return 0.0; },
                                        [](double) { return 1.0; }};
  const std::vector<double> f0 = {0.5, -1.0, 2.0};
  const auto path = lie_integral_flow(sl2, b, f0, 0.0, 3.0, Rkf45{});
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double t = path.times[i];
    CHECK(path.f[i][0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(path.f[i][1] == doctest::Approx(-1.0 + 2 * 0.5 * t).epsilon(1e-9));
    CHECK(path.f[i][2] == doctest::Approx(2.0 - t + 0.5 * t * t).epsilon(1e-9));
  }

  const std::vector<CoefficientFn> rb = {[](double t) { return std::cos(t); },
                                         [](double t) { return t; }, [](double) { return -2.0; }};
  const auto flat = lie_integral_flow(abelian(3), rb, f0, 0.0, 3.0, Rkf45{});
  for (const auto& f : flat.f) CHECK(f == f0);

  const std::vector<double> zero(3, 0.0);
  const auto z = lie_integral_flow(sl2, rb, zero, 0.0, 3.0, Rkf45{});
  for (const auto& f : z.f) CHECK(f == zero);
}

TEST_CASE("verify_lie_integral on smorodinsky-winternitz") {
  SystemParams p;
  p.values["b"] = 1.0;
  const auto sys = catalog("smorodinsky-winternitz", p);
  const std::vector<double> x0 = {1.0, 0.3};
  const auto tr = integrate(as_ode(sys), x0, 0.0, 5.0, Rkf45{});
  const std::vector<double> f0 = {0.2, 1.0, -0.5};
  const auto path = lie_integral_flow(sys.sc, sys.b, f0, 0.0, 5.0, Rkf45{}, tr.times);
  const auto ok = verify_lie_integral(sys, path, tr, 1e-6);
  CHECK(ok.pass);
  CHECK(ok.max_drift < 1e-6);

  // A path driven by different coefficients is not a constant of motion.
  const std::vector<CoefficientFn> wrong = {[](double) { return 4.0; }, [](double) { return 0.0; },
                                            [](double) { return 1.0; }};
  const auto wpath = lie_integral_flow(sys.sc, wrong, f0, 0.0, 5.0, Rkf45{}, tr.times);
  CHECK_FALSE(verify_lie_integral(sys, wpath, tr, 1e-6).pass);
}

TEST_CASE("property: the bracket of two constants of motion is conserved") {
  // {F^(2), F^(2)_{23}} on three copies is again a constant of motion.
  const auto ks = catalog("kummer-schwarz");
  const SymPoly f2 = embed(coproduct(*ks.casimir, 2), 3);
  const SymPoly f23 = permute_copies(f2, transposition(3, 1, 2));
  const SymPoly br = poisson_bracket(f2, f23, ks.sc);
  const auto inv = realized("{F2,F23}", br, *ks.realization);
  testing::Gen g(6);
  for (int trial = 0; trial < 3; ++trial) {
    const Point s = sample_point(power(ks.space, 3), g, 0.2);
    const auto tr = integrate(as_ode(prolong(ks, 3)), s, 0.0, 1.0, Rkf45{});
    CHECK(monitor_invariants(tr, {inv}).max_drift() < 1e-6);
  }
}
