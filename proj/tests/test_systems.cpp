#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <json.hpp>

#include "lhk/dynamics.hpp"
#include "lhk/error.hpp"
#include "lhk/systems.hpp"
#include "support.hpp"

using namespace lhk;

namespace {

SystemParams with_curve(const std::string& k, const std::string& text) {
  SystemParams p;
  p.curves.insert_or_assign(k, parse_curve(text));
  return p;
}

}  // namespace

TEST_CASE("catalog lists every entry") {
  const auto names = system_names();
  for (const char* want : {"ermakov", "kummer-schwarz", "riccati", "riccati4", "second-order-riccati",
                           "smorodinsky-winternitz", "trig-su2"}) {
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
  }
  CHECK_THROWS_AS(catalog("lorenz"), CatalogError);
  SystemParams bad;
  bad.values["zeta"] = 1.0;
  CHECK_THROWS_AS(catalog("kummer-schwarz", bad), InvalidArgument);
  SystemParams n0;
  n0.values["n"] = 0.0;
  CHECK_THROWS_AS(catalog("smorodinsky-winternitz", n0), InvalidArgument);
}

TEST_CASE("smorodinsky-winternitz vector field") {
  // X_f = (df/dp, -df/dx); H = w^2 x^2/2 + (p^2 + b/x^2)/2 gives (p, -w^2 x + b/x^3).
  SystemParams p = with_curve("omega", "2");
  p.values["b"] = 0.5;
  const auto sys = catalog("smorodinsky-winternitz", p);
  const std::vector<double> x = {1.2, -0.3};
  const auto v = vector_field(sys, 0.4, x);
  CHECK(v[0] == doctest::Approx(-0.3));
  CHECK(v[1] == doctest::Approx(-4 * 1.2 + 0.5 / (1.2 * 1.2 * 1.2)));
  CHECK_THROWS_AS(vector_field(sys, 0.0, std::vector<double>{0.0, 1.0}), DomainError);

  SystemParams z = with_curve("omega", "1");
  z.values["b"] = 0.0;
  const auto free = catalog("smorodinsky-winternitz", z);
  const auto w = vector_field(free, 0.0, std::vector<double>{0.0, 1.0});
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(0.0));
}

TEST_CASE("kummer-schwarz vector field") {
  SystemParams p = with_curve("b1", "cos");
  p.values["b0"] = 1.5;
  const auto sys = catalog("kummer-schwarz", p);
  const double t = 0.3, x = 0.9, q = 0.4;
  const auto v = vector_field(sys, t, std::vector<double>{x, q});
  CHECK(v[0] == doctest::Approx(q * x * x * x / 2));
  CHECK(v[1] == doctest::Approx(std::cos(t) * 4 / (x * x) - (3 * q * q * x * x + 1.5) / 4));
}

TEST_CASE("harmonic oscillator closed form") {
  SystemParams p = with_curve("omega", "1.5");
  p.values["b"] = 0.0;
  const auto sys = prolong(catalog("smorodinsky-winternitz", p), 1);
  const std::vector<double> x0 = {0.7, 0.2};
  const auto traj = integrate(as_ode(sys), x0, 0.0, 3.0, Rkf45{1e-12, 1e-12});
  const double t = traj.times.back();
  const auto& s = traj.states.back();
  const double w = 1.5;
  CHECK(s[0] == doctest::Approx(0.7 * std::cos(w * t) + 0.2 / w * std::sin(w * t)).epsilon(1e-8));
  CHECK(s[1] == doctest::Approx(-0.7 * w * std::sin(w * t) + 0.2 * std::cos(w * t)).epsilon(1e-8));
}

TEST_CASE("trig-su2 with a constant vertical field") {
  SystemParams p;
  p.curves.insert_or_assign("Bx", CoefficientCurve::constant(0));
  p.curves.insert_or_assign("By", CoefficientCurve::constant(0));
  p.curves.insert_or_assign("Bz", CoefficientCurve::constant(1));
  const auto sys = catalog("trig-su2", p);
  const auto v = vector_field(sys, 0.0, std::vector<double>{0.4, 1.0});
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[1] == doctest::Approx(-1.0));
  const std::vector<double> x0 = {0.4, 1.0};
  const auto traj = integrate(as_ode(sys), x0, 0.0, 2.0, Rkf45{});
  CHECK(traj.states.back()[0] == doctest::Approx(0.4));
  CHECK(traj.states.back()[1] == doctest::Approx(1.0 - 2.0));
  CHECK_THROWS_AS(vector_field(sys, 0.0, std::vector<double>{0.9999999, 0.0}), DomainError);
}

TEST_CASE("riccati4 is the 4-fold prolongation of the scalar Riccati equation") {
  const auto r1 = catalog("riccati");
  const auto r4 = catalog("riccati4");
  const auto pr = prolong(r1, 4);
  CHECK(pr.dim() == 4);
  testing::Gen g(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Point x = sample_point(r4.space, g, 0.1);
    const double t = testing::uniform(g, -2, 2);
    const auto a = vector_field(r4, t, x);
    const auto b = vector_field(pr, t, x);
    for (int i = 0; i < 4; ++i) {
      CHECK(a[i] == doctest::Approx(std::sin(t) + 0.5 * x[i] + std::cos(t) * x[i] * x[i]));
      CHECK(a[i] == doctest::Approx(b[i]));
    }
  }
  CHECK_FALSE(r1.is_hamiltonian());
  CHECK(r4.is_hamiltonian());
}

TEST_CASE("property: prolonged fields are permutation equivariant") {
  testing::Gen g(8);
  for (const auto& name : {"kummer-schwarz", "trig-su2", "smorodinsky-winternitz", "riccati"}) {
    const auto base = catalog(name);
    const int n = base.n();
    const auto sys = prolong(base, 3);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Point> copies;
      for (int c = 0; c < 3; ++c) copies.push_back(sample_point(base.space, g));
      const double t = testing::uniform(g, 0, 3);
      auto flat = [&](std::array<int, 3> order) {
        std::vector<double> s;
        for (int c : order) s.insert(s.end(), copies[c].begin(), copies[c].end());
        return s;
      };
      const auto v = vector_field(sys, t, flat({0, 1, 2}));
      const auto w = vector_field(sys, t, flat({2, 0, 1}));
      const std::array<int, 3> order = {2, 0, 1};
      for (int c = 0; c < 3; ++c)
        for (int i = 0; i < n; ++i) CHECK(w[c * n + i] == doctest::Approx(v[order[c] * n + i]));
    }
  }
}

TEST_CASE("property: vector field is linear in the coefficients") {
  testing::Gen g(9);
  for (const auto& name : system_names()) {
    const auto sys = catalog(name);
    const int r = sys.r();
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> u(r), w(r);
      for (int a = 0; a < r; ++a) {
        u[a] = testing::uniform(g, -1, 1);
        w[a] = testing::uniform(g, -1, 1);
      }
      auto constant_system = [&](const std::vector<double>& c) {
        std::vector<CoefficientFn> fns;
        for (double v : c) fns.push_back([v](double) { return v; });
        return with_coefficients(sys, fns, {});
      };
      std::vector<double> sum(r);
      for (int a = 0; a < r; ++a) sum[a] = u[a] + 2.0 * w[a];
      const Point x = sample_point(sys.space, g, sys.sample_margin);
      const auto fu = vector_field(constant_system(u), 0.0, x);
      const auto fw = vector_field(constant_system(w), 0.0, x);
      const auto fs = vector_field(constant_system(sum), 0.0, x);
      for (int i = 0; i < sys.n(); ++i)
        CHECK(fs[i] == doctest::Approx(fu[i] + 2.0 * fw[i]).epsilon(1e-9).scale(1.0));
    }
  }
  CHECK_THROWS_AS(with_coefficients(catalog("riccati"), {}, {}), ShapeError);
}

TEST_CASE("JSON descriptors") {
  const auto a = system_from_json(R"({"name": "kummer-schwarz", "params": {"b0": 2}, "coefficients": ["1+t"]})");
  CHECK(a.params.at("b0") == 2.0);
  CHECK(a.b[0](2.0) == doctest::Approx(3.0));
  const auto b = system_from_json(
      R"({"name": "trig-su2", "coefficients": {"Bz": {"form": "sinusoid", "a": 2, "omega": 3}}})");
  CHECK(b.b[2](0.5) == doctest::Approx(2 * std::cos(1.5)));
  const auto c = system_from_json(
      R"({"name": "smorodinsky-winternitz", "params": {"n": 2, "b": [0.5, 0.25]},
          "coefficients": [{"form": "tabulated", "t": [0, 1, 2], "y": [1, 1, 1]}]})");
  CHECK(c.n() == 4);
  CHECK(c.b[0](1.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(c.b[0](3.0), DomainError);
  CHECK(coefficient_names("riccati4") == std::vector<std::string>{"a0", "a1", "a2"});

  CHECK_THROWS_AS(system_from_json("[1]"), ParseError);
  CHECK_THROWS_AS(system_from_json(R"({"name": "nope"})"), CatalogError);
  CHECK_THROWS_AS(system_from_json(R"({"name": "riccati", "coefficients": ["1", "2", "3", "4"]})"),
                  InvalidArgument);
  CHECK_THROWS_AS(system_from_json(R"j({"name": "riccati", "coefficients": ["cos(x)"]})j"), ParseError);

  const auto d = nlohmann::json::parse(describe_json(catalog("kummer-schwarz")));
  CHECK(d["state_dim"] == 2);
  CHECK(d["algebra"] == "sl2");
  CHECK(d["superposition_rule"] == "kummer-schwarz");
  CHECK(d["lie_hamilton"] == true);
  CHECK(nlohmann::json::parse(describe_json(catalog("riccati")))["lie_hamilton"] == false);
}
