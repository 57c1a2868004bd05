#include "lhk/systems.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <Eigen/Dense>

#include "lhk/error.hpp"

namespace lhk {

using json = nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Grad = std::function<std::vector<double>(std::span<const double>)>;

SmoothFunction fn(std::function<double(std::span<const double>)> v, Grad g) {
  return SmoothFunction{std::move(v), std::move(g)};
}

CoefficientFn constant_fn(double c) {
  return [c](double) { return c; };
}

CoefficientFn curve_fn(const CoefficientCurve& c) {
  return [c](double t) { return c(t); };
}

void evaluate_b(const LieSystem& sys, double t, std::vector<double>& out) {
  out.resize(sys.b.size());
  for (std::size_t a = 0; a < sys.b.size(); ++a) out[a] = sys.b[a](t);
}

void field_with_b(const LieSystem& sys, std::span<const double> bvals, std::span<const double> x,
                  std::span<double> out) {
  const int n = sys.n();
  std::fill(out.begin(), out.end(), 0.0);
  if (sys.realization) {
    const Realization& R = *sys.realization;
    std::vector<double> g(n, 0.0);
    for (int a = 0; a < R.r(); ++a) {
      if (bvals[a] == 0.0) continue;
      const std::vector<double> gh = R.hams[a].grad(x);
      for (int i = 0; i < n; ++i) g[i] += bvals[a] * gh[i];
    }
    const Matrix<double> lam = R.manifold.bivector.at(x);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += lam(i, j) * g[j];
      out[i] = s;
    }
  } else {
    for (std::size_t a = 0; a < sys.fields.size(); ++a) {
      if (bvals[a] == 0.0) continue;
      const std::vector<double> v = sys.fields[a](x);
      for (int i = 0; i < n; ++i) out[i] += bvals[a] * v[i];
    }
  }
}

SymPoly sl2_casimir() { return parse_sympoly("v1*v3 - v2^2", 3, 1); }
SymPoly su2_casimir() { return parse_sympoly("v1^2 + v2^2 + v3^2", 3, 1); }

// ---- parameter plumbing ----------------------------------------------------

struct ParamReader {
  std::string system;
  const SystemParams& p;
  std::set<std::string> used;

  double value(const std::string& key, double def) {
    used.insert(key);
    auto it = p.values.find(key);
    return it == p.values.end() ? def : it->second;
  }

  std::vector<double> list(const std::string& key, std::size_t n, double def) {
    used.insert(key);
    if (auto it = p.lists.find(key); it != p.lists.end()) {
      if (it->second.size() != n) {
        throw InvalidArgument(system + ": parameter '" + key + "' needs " + std::to_string(n) +
                              " entries");
      }
      return it->second;
    }
    return std::vector<double>(n, value(key, def));
  }

  CoefficientCurve curve(const std::string& key, std::string_view def) {
    used.insert(key);
    if (auto it = p.curves.find(key); it != p.curves.end()) return it->second;
    if (auto it = p.values.find(key); it != p.values.end()) {
      return CoefficientCurve::constant(it->second);
    }
    return parse_curve(def);
  }

  void finish() const {
    auto check = [&](const std::string& k) {
      if (!used.count(k)) throw InvalidArgument(system + ": unknown parameter '" + k + "'");
    };
    for (const auto& kv : p.values) check(kv.first);
    for (const auto& kv : p.lists) check(kv.first);
    for (const auto& kv : p.curves) check(kv.first);
  }
};

void set_curve(LieSystem& sys, const std::string& name, const CoefficientCurve& c) {
  sys.curves[name] = c.describe();
}

// ---- catalog entries -------------------------------------------------------

Realization sw_realization(const std::string& name, int n, const std::vector<double>& bs,
                           std::vector<std::string> names) {
  Realization R{name, {}, {}, builtin("sl2").sc};
  PhaseSpace& S = R.manifold.space;
  S.n = 2 * n;
  S.names = std::move(names);
  S.box_lo.assign(2 * n, -1.0);
  S.box_hi.assign(2 * n, 1.0);
  for (int i = 0; i < n; ++i) {
    S.box_lo[i] = 0.5;
    S.box_hi[i] = 1.5;
  }
  std::vector<int> singular;
  for (int i = 0; i < n; ++i) {
    if (bs[i] != 0.0) singular.push_back(i);
  }
  if (!singular.empty()) {
    std::string desc;
    for (int i : singular) desc += (desc.empty() ? "" : ", ") + S.names[i] + " != 0";
    S.domain_description = desc;
    S.domain = [singular](std::span<const double> x) {
      DomainCheck c{kInf, -1};
      for (int i : singular) {
        if (std::abs(x[i]) < c.margin) c = {std::abs(x[i]), i};
      }
      return c;
    };
  } else {
    S.domain_description = "all of R^" + std::to_string(2 * n);
  }
  R.manifold.bivector = PoissonBivector::canonical(n);
  R.hams.push_back(fn(
      [n](std::span<const double> x) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += x[i] * x[i];
        return 0.5 * s;
      },
      [n](std::span<const double> x) {
        std::vector<double> g(2 * n, 0.0);
        for (int i = 0; i < n; ++i) g[i] = x[i];
        return g;
      }));
  R.hams.push_back(fn(
      [n](std::span<const double> x) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += x[i] * x[n + i];
        return -0.5 * s;
      },
      [n](std::span<const double> x) {
        std::vector<double> g(2 * n);
        for (int i = 0; i < n; ++i) {
          g[i] = -0.5 * x[n + i];
          g[n + i] = -0.5 * x[i];
        }
        return g;
      }));
  R.hams.push_back(fn(
      [n, bs](std::span<const double> x) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          s += x[n + i] * x[n + i];
          if (bs[i] != 0.0) s += bs[i] / (x[i] * x[i]);
        }
        return 0.5 * s;
      },
      [n, bs](std::span<const double> x) {
        std::vector<double> g(2 * n);
        for (int i = 0; i < n; ++i) {
          g[i] = bs[i] == 0.0 ? 0.0 : -bs[i] / (x[i] * x[i] * x[i]);
          g[n + i] = x[n + i];
        }
        return g;
      }));
  return R;
}

LieSystem make_ermakov(const SystemParams& params) {
  ParamReader rd{"ermakov", params, {}};
  const double b = rd.value("b", 1.0);
  const CoefficientCurve omega = rd.curve("omega", "1+0.3*cos");
  rd.finish();

  LieSystem sys;
  sys.name = "ermakov";
  sys.notes =
      "Classical Ermakov system x'' = -w(t)^2 x + b/x^3, y'' = -w(t)^2 y as a first-order "
      "system on (x, y, vx, vy). The realized sl2 Casimir equals one quarter of the "
      "Lewis-Riesenfeld invariant (vy x - vx y)^2 + b (1 + y^2/x^2).";
  sys.realization = sw_realization("ermakov", 2, {b, 0.0}, {"x", "y", "vx", "vy"});
  if (b != 0.0) sys.realization->manifold.space.domain_description = "x != 0";
  sys.space = sys.realization->manifold.space;
  sys.sc = sys.realization->sc;
  sys.algebra = "sl2";
  sys.generator_text = {"h1 = (x^2 + y^2)/2", "h2 = -(x vx + y vy)/2",
                        "h3 = (vx^2 + vy^2 + b/x^2)/2"};
  sys.b = {[omega](double t) { return omega(t) * omega(t); }, constant_fn(0.0), constant_fn(1.0)};
  sys.b_text = {"omega(t)^2", "0", "1"};
  sys.casimir = sl2_casimir();
  sys.params["b"] = b;
  set_curve(sys, "omega", omega);
  return sys;
}

LieSystem make_sw(const SystemParams& params) {
  ParamReader rd{"smorodinsky-winternitz", params, {}};
  const double nd = rd.value("n", 1.0);
  if (!(nd >= 1.0) || nd != std::floor(nd) || nd > 64) {
    throw InvalidArgument("smorodinsky-winternitz: n must be a positive integer");
  }
  const int n = static_cast<int>(nd);
  const std::vector<double> bs = rd.list("b", n, 1.0);
  const CoefficientCurve omega = rd.curve("omega", "1+0.3*cos");
  rd.finish();

  std::vector<std::string> names;
  if (n == 1) {
    names = {"x", "p"};
  } else {
    for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
    for (int i = 1; i <= n; ++i) names.push_back("p" + std::to_string(i));
  }

  LieSystem sys;
  sys.name = "smorodinsky-winternitz";
  sys.notes =
      "n-dimensional Smorodinsky-Winternitz oscillator x_i'' = -w(t)^2 x_i + b_i/x_i^3 "
      "with unit mass. For n = 1 this is the Milne-Pinney equation.";
  sys.realization = sw_realization(sys.name, n, bs, names);
  sys.space = sys.realization->manifold.space;
  sys.sc = sys.realization->sc;
  sys.algebra = "sl2";
  sys.generator_text = {"h1 = sum x_i^2/2", "h2 = -sum x_i p_i/2",
                        "h3 = sum (p_i^2 + b_i/x_i^2)/2"};
  sys.b = {[omega](double t) { return omega(t) * omega(t); }, constant_fn(0.0), constant_fn(1.0)};
  sys.b_text = {"omega(t)^2", "0", "1"};
  sys.casimir = sl2_casimir();
  if (n == 1) sys.rule = "milne-pinney";
  sys.params["n"] = n;
  if (n == 1) {
    sys.params["b"] = bs[0];
  } else {
    for (int i = 0; i < n; ++i) sys.params["b" + std::to_string(i + 1)] = bs[i];
  }
  set_curve(sys, "omega", omega);
  return sys;
}

LieSystem make_kummer_schwarz(const SystemParams& params) {
  ParamReader rd{"kummer-schwarz", params, {}};
  const double b0 = rd.value("b0", 1.0);
  const CoefficientCurve b1 = rd.curve("b1", "cos");
  rd.finish();

  Realization R{"kummer-schwarz", {}, {}, builtin("sl2").sc};
  PhaseSpace& S = R.manifold.space;
  S.n = 2;
  S.names = {"x", "p"};
  S.domain = [](std::span<const double> x) { return DomainCheck{std::abs(x[0]), 0}; };
  S.domain_description = "x != 0";
  S.box_lo = {0.5, -0.5};
  S.box_hi = {1.5, 0.5};
  R.manifold.bivector = PoissonBivector::canonical(1);
  R.hams.push_back(fn([](std::span<const double> x) { return 4.0 / x[0]; },
                      [](std::span<const double> x) {
                        return std::vector<double>{-4.0 / (x[0] * x[0]), 0.0};
                      }));
  R.hams.push_back(fn([](std::span<const double> x) { return x[0] * x[1]; },
                      [](std::span<const double> x) { return std::vector<double>{x[1], x[0]}; }));
  R.hams.push_back(fn(
      [b0](std::span<const double> x) {
        return 0.25 * (x[1] * x[1] * x[0] * x[0] * x[0] + b0 * x[0]);
      },
      [b0](std::span<const double> x) {
        return std::vector<double>{0.25 * (3.0 * x[1] * x[1] * x[0] * x[0] + b0),
                                   0.5 * x[1] * x[0] * x[0] * x[0]};
      }));

  LieSystem sys;
  sys.name = "kummer-schwarz";
  sys.notes =
      "Second-order Kummer-Schwarz equation as a first-order system on T*R0 with canonical "
      "bracket; dx/dt = p x^3/2. The realized sl2 Casimir is the constant b0.";
  sys.realization = std::move(R);
  sys.space = sys.realization->manifold.space;
  sys.sc = sys.realization->sc;
  sys.algebra = "sl2";
  sys.generator_text = {"h1 = 4/x", "h2 = x p", "h3 = (p^2 x^3 + b0 x)/4"};
  sys.b = {curve_fn(b1), constant_fn(0.0), constant_fn(1.0)};
  sys.b_text = {"b1(t)", "0", "1"};
  sys.casimir = sl2_casimir();
  sys.rule = "kummer-schwarz";
  sys.params["b0"] = b0;
  set_curve(sys, "b1", b1);
  return sys;
}

LieSystem make_trig_su2(const SystemParams& params) {
  ParamReader rd{"trig-su2", params, {}};
  const CoefficientCurve bx = rd.curve("Bx", "cos");
  const CoefficientCurve by = rd.curve("By", "sin");
  const CoefficientCurve bz = rd.curve("Bz", "1");
  rd.finish();

  constexpr double kEdge = 1.0 - 1e-6;
  Realization R{"trig-su2", {}, {}, builtin("su2").sc};
  PhaseSpace& S = R.manifold.space;
  S.n = 2;
  S.names = {"x", "p"};
  S.domain = [](std::span<const double> x) { return DomainCheck{kEdge - std::abs(x[0]), 0}; };
  S.domain_description = "|x| < 1 - 1e-6";
  S.box_lo = {-0.8, -std::numbers::pi};
  S.box_hi = {0.8, std::numbers::pi};
  R.manifold.bivector = PoissonBivector::canonical(1);
  R.hams.push_back(fn(
      [](std::span<const double> x) { return -std::sqrt(1.0 - x[0] * x[0]) * std::cos(x[1]); },
      [](std::span<const double> x) {
        const double s = std::sqrt(1.0 - x[0] * x[0]);
        return std::vector<double>{x[0] * std::cos(x[1]) / s, s * std::sin(x[1])};
      }));
  R.hams.push_back(fn(
      [](std::span<const double> x) { return -std::sqrt(1.0 - x[0] * x[0]) * std::sin(x[1]); },
      [](std::span<const double> x) {
        const double s = std::sqrt(1.0 - x[0] * x[0]);
        return std::vector<double>{x[0] * std::sin(x[1]) / s, -s * std::cos(x[1])};
      }));
  R.hams.push_back(fn([](std::span<const double> x) { return x[0]; },
                      [](std::span<const double>) { return std::vector<double>{1.0, 0.0}; }));

  LieSystem sys;
  sys.name = "trig-su2";
  sys.notes =
      "Spin-like system on the open strip |x| < 1 with canonical bracket, driven by a "
      "t-dependent field (Bx, By, Bz). The realized su2 Casimir is identically 1.";
  sys.realization = std::move(R);
  sys.space = sys.realization->manifold.space;
  sys.sc = sys.realization->sc;
  sys.algebra = "su2";
  sys.generator_text = {"h1 = -sqrt(1 - x^2) cos p", "h2 = -sqrt(1 - x^2) sin p", "h3 = x"};
  sys.b = {curve_fn(bx), curve_fn(by), curve_fn(bz)};
  sys.b_text = {"Bx(t)", "By(t)", "Bz(t)"};
  sys.casimir = su2_casimir();
  sys.rule = "trig-su2";
  set_curve(sys, "Bx", bx);
  set_curve(sys, "By", by);
  set_curve(sys, "Bz", bz);
  return sys;
}

using Pairs = std::vector<std::pair<int, int>>;

// h1 = sum 1/(xi - xj), h2 = sum (xi + xj)/(2 (xi - xj)), h3 = sum xi xj/(xi - xj).
std::vector<SmoothFunction> pair_sum_hams(const Pairs& pairs) {
  std::vector<SmoothFunction> h;
  h.push_back(fn(
      [pairs](std::span<const double> x) {
        double s = 0.0;
        for (auto [i, j] : pairs) s += 1.0 / (x[i] - x[j]);
        return s;
      },
      [pairs](std::span<const double> x) {
        std::vector<double> g(4, 0.0);
        for (auto [i, j] : pairs) {
          const double d2 = (x[i] - x[j]) * (x[i] - x[j]);
          g[i] -= 1.0 / d2;
          g[j] += 1.0 / d2;
        }
        return g;
      }));
  h.push_back(fn(
      [pairs](std::span<const double> x) {
        double s = 0.0;
        for (auto [i, j] : pairs) s += 0.5 * (x[i] + x[j]) / (x[i] - x[j]);
        return s;
      },
      [pairs](std::span<const double> x) {
        std::vector<double> g(4, 0.0);
        for (auto [i, j] : pairs) {
          const double d2 = (x[i] - x[j]) * (x[i] - x[j]);
          g[i] -= x[j] / d2;
          g[j] += x[i] / d2;
        }
        return g;
      }));
  h.push_back(fn(
      [pairs](std::span<const double> x) {
        double s = 0.0;
        for (auto [i, j] : pairs) s += x[i] * x[j] / (x[i] - x[j]);
        return s;
      },
      [pairs](std::span<const double> x) {
        std::vector<double> g(4, 0.0);
        for (auto [i, j] : pairs) {
          const double d2 = (x[i] - x[j]) * (x[i] - x[j]);
          g[i] -= x[j] * x[j] / d2;
          g[j] += x[i] * x[i] / d2;
        }
        return g;
      }));
  return h;
}

PhaseSpace riccati4_space() {
  PhaseSpace S;
  S.n = 4;
  S.names = {"x1", "x2", "x3", "x4"};
  S.domain = [](std::span<const double> x) {
    DomainCheck c{kInf, -1};
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        const double d = std::abs(x[i] - x[j]);
        if (d < c.margin) c = {d, j};
      }
    }
    return c;
  };
  S.domain_description = "pairwise distinct x1..x4";
  S.box_lo.assign(4, -2.0);
  S.box_hi.assign(4, 2.0);
  return S;
}

LieSystem make_riccati4(const SystemParams& params) {
  ParamReader rd{"riccati4", params, {}};
  const CoefficientCurve a0 = rd.curve("a0", "sin");
  const CoefficientCurve a1 = rd.curve("a1", "0.5");
  const CoefficientCurve a2 = rd.curve("a2", "cos");
  rd.finish();

  const StructureConstants sl2 = builtin("sl2").sc;
  Realization R1{"riccati4", {riccati4_space(), {}}, pair_sum_hams({{0, 1}, {2, 3}}), sl2};
  R1.manifold.bivector.description = "(x1-x2)^2 d1^d2 + (x3-x4)^2 d3^d4";
  R1.manifold.bivector.at = [](std::span<const double> x) {
    Matrix<double> m(4, 4);
    const double a = (x[0] - x[1]) * (x[0] - x[1]);
    const double c = (x[2] - x[3]) * (x[2] - x[3]);
    m(0, 1) = a;
    m(1, 0) = -a;
    m(2, 3) = c;
    m(3, 2) = -c;
    return m;
  };

  Pairs all;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) all.emplace_back(i, j);
  }
  Realization R2{"riccati4/all-pairs", {riccati4_space(), {}}, pair_sum_hams(all), sl2};
  R2.manifold.bivector.description = "-W^{-1}, W = sum_{i<j} dxi^dxj/(xi-xj)^2";
  R2.manifold.bivector.at = [](std::span<const double> x) {
    Eigen::Matrix4d W = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        const double w = 1.0 / ((x[i] - x[j]) * (x[i] - x[j]));
        W(i, j) = w;
        W(j, i) = -w;
      }
    }
    const Eigen::Matrix4d L = -W.inverse();
    Matrix<double> m(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) m(i, j) = i == j ? 0.0 : 0.5 * (L(i, j) - L(j, i));
    }
    return m;
  };

  LieSystem sys;
  sys.name = "riccati4";
  sys.notes =
      "Four coupled Riccati equations dx_i/dt = a0(t) + a1(t) x_i + a2(t) x_i^2 on pairwise "
      "distinct 4-tuples. Bi-Hamiltonian: the primary bivector pairs (x1,x2) and (x3,x4); "
      "the alternate one inverts the symplectic form summed over all six pairs, with "
      "Hamiltonians summed over the same six pairs.";
  sys.space = R1.manifold.space;
  sys.sc = sl2;
  sys.algebra = "sl2";
  sys.realization = std::move(R1);
  sys.alternate_realizations.push_back(std::move(R2));
  sys.generator_text = {"h1 = 1/(x1-x2) + 1/(x3-x4)",
                        "h2 = (x1+x2)/(2(x1-x2)) + (x3+x4)/(2(x3-x4))",
                        "h3 = x1 x2/(x1-x2) + x3 x4/(x3-x4)"};
  sys.b = {curve_fn(a0), curve_fn(a1), curve_fn(a2)};
  sys.b_text = {"a0(t)", "a1(t)", "a2(t)"};
  sys.casimir = sl2_casimir();
  sys.sample_margin = 0.1;
  set_curve(sys, "a0", a0);
  set_curve(sys, "a1", a1);
  set_curve(sys, "a2", a2);
  return sys;
}

LieSystem make_riccati(const SystemParams& params) {
  ParamReader rd{"riccati", params, {}};
  const CoefficientCurve a0 = rd.curve("a0", "sin");
  const CoefficientCurve a1 = rd.curve("a1", "0.5");
  const CoefficientCurve a2 = rd.curve("a2", "cos");
  rd.finish();

  LieSystem sys;
  sys.name = "riccati";
  sys.notes =
      "Scalar Riccati equation dx/dt = a0(t) + a1(t) x + a2(t) x^2. A Lie system with "
      "Vessiot-Guldberg algebra sl2 spanned by d/dx, x d/dx, x^2 d/dx; it has no Poisson "
      "realization on the line. Its 4-fold prolongation is riccati4.";
  sys.space.n = 1;
  sys.space.names = {"x"};
  sys.space.domain_description = "all of R";
  sys.space.box_lo = {-1.0};
  sys.space.box_hi = {1.0};
  sys.sc = builtin("sl2").sc;
  sys.algebra = "sl2";
  sys.fields = {
      [](std::span<const double>) { return std::vector<double>{1.0}; },
      [](std::span<const double> x) { return std::vector<double>{x[0]}; },
      [](std::span<const double> x) { return std::vector<double>{x[0] * x[0]}; },
  };
  sys.generator_text = {"X1 = d/dx", "X2 = x d/dx", "X3 = x^2 d/dx"};
  sys.b = {curve_fn(a0), curve_fn(a1), curve_fn(a2)};
  sys.b_text = {"a0(t)", "a1(t)", "a2(t)"};
  sys.rule = "riccati";
  set_curve(sys, "a0", a0);
  set_curve(sys, "a1", a1);
  set_curve(sys, "a2", a2);
  return sys;
}

LieSystem make_second_order_riccati(const SystemParams& params) {
  ParamReader rd{"second-order-riccati", params, {}};
  const CoefficientCurve a0 = rd.curve("a0", "sin");
  const CoefficientCurve a1 = rd.curve("a1", "0.5");
  const CoefficientCurve a2 = rd.curve("a2", "cos");
  rd.finish();

  Realization R{"second-order-riccati", {}, {}, builtin("h6").sc};
  PhaseSpace& S = R.manifold.space;
  S.n = 2;
  S.names = {"x", "p"};
  S.domain = [](std::span<const double> x) { return DomainCheck{-x[1], 1}; };
  S.domain_description = "p < 0";
  S.box_lo = {-1.0, -2.0};
  S.box_hi = {1.0, -0.25};
  R.manifold.bivector = PoissonBivector::canonical(1);
  auto sq = [](std::span<const double> x) { return std::sqrt(-x[1]); };
  R.hams.push_back(fn([sq](std::span<const double> x) { return -2.0 * sq(x); },
                      [sq](std::span<const double> x) {
                        return std::vector<double>{0.0, 1.0 / sq(x)};
                      }));
  R.hams.push_back(fn([](std::span<const double> x) { return x[1]; },
                      [](std::span<const double>) { return std::vector<double>{0.0, 1.0}; }));
  R.hams.push_back(fn([](std::span<const double> x) { return x[0] * x[1]; },
                      [](std::span<const double> x) { return std::vector<double>{x[1], x[0]}; }));
  R.hams.push_back(fn([](std::span<const double> x) { return x[0] * x[0] * x[1]; },
                      [](std::span<const double> x) {
                        return std::vector<double>{2.0 * x[0] * x[1], x[0] * x[0]};
                      }));
  R.hams.push_back(fn([sq](std::span<const double> x) { return -2.0 * x[0] * sq(x); },
                      [sq](std::span<const double> x) {
                        return std::vector<double>{-2.0 * sq(x), x[0] / sq(x)};
                      }));
  R.hams.push_back(fn([](std::span<const double>) { return 1.0; },
                      [](std::span<const double>) { return std::vector<double>{0.0, 0.0}; }));

  LieSystem sys;
  sys.name = "second-order-riccati";
  sys.notes =
      "Second-order Riccati equation in Hamiltonian form on p < 0 with the six-dimensional "
      "algebra h6 (h6 = 1 central). h_t = h1 - a0 h2 - a1 h3 - a2 h4. No superposition rule "
      "is provided.";
  sys.realization = std::move(R);
  sys.space = sys.realization->manifold.space;
  sys.sc = sys.realization->sc;
  sys.algebra = "h6";
  sys.generator_text = {"h1 = -2 sqrt(-p)", "h2 = p",        "h3 = x p",
                        "h4 = x^2 p",       "h5 = -2 x sqrt(-p)", "h6 = 1"};
  auto neg = [](const CoefficientCurve& c) { return [c](double t) { return -c(t); }; };
  sys.b = {constant_fn(1.0), neg(a0), neg(a1), neg(a2), constant_fn(0.0), constant_fn(0.0)};
  sys.b_text = {"1", "-a0(t)", "-a1(t)", "-a2(t)", "0", "0"};
  set_curve(sys, "a0", a0);
  set_curve(sys, "a1", a1);
  set_curve(sys, "a2", a2);
  return sys;
}

struct CatalogItem {
  const char* name;
  LieSystem (*make)(const SystemParams&);
  std::vector<std::string> curves;
};

const std::vector<CatalogItem>& items() {
  static const std::vector<CatalogItem> v = {
      {"ermakov", make_ermakov, {"omega"}},
      {"kummer-schwarz", make_kummer_schwarz, {"b1"}},
      {"riccati", make_riccati, {"a0", "a1", "a2"}},
      {"riccati4", make_riccati4, {"a0", "a1", "a2"}},
      {"second-order-riccati", make_second_order_riccati, {"a0", "a1", "a2"}},
      {"smorodinsky-winternitz", make_sw, {"omega"}},
      {"trig-su2", make_trig_su2, {"Bx", "By", "Bz"}},
  };
  return v;
}

const CatalogItem& find_item(std::string_view name) {
  for (const auto& it : items()) {
    if (name == it.name) return it;
  }
  std::string known;
  for (const auto& it : items()) known += (known.empty() ? "" : ", ") + std::string(it.name);
  throw CatalogError("unknown system '" + std::string(name) + "' (known: " + known + ")");
}

CoefficientCurve curve_from_json(const json& j) {
  if (j.is_string()) return parse_curve(j.get<std::string>());
  if (j.is_number()) return CoefficientCurve::constant(j.get<double>());
  if (!j.is_object() || !j.contains("form")) {
    throw ParseError("coefficient must be a string, a number or an object with \"form\"");
  }
  const std::string form = j.at("form").get<std::string>();
  if (form == "constant") return CoefficientCurve::constant(j.value("c", 0.0));
  if (form == "polynomial") {
    return CoefficientCurve::polynomial(j.at("coeffs").get<std::vector<double>>());
  }
  if (form == "sinusoid") {
    return CoefficientCurve::sinusoid(j.value("a", 1.0), j.value("omega", 1.0), j.value("phi", 0.0),
                                      j.value("c", 0.0));
  }
  if (form == "tabulated") {
    return CoefficientCurve::tabulated(j.at("t").get<std::vector<double>>(),
                                       j.at("y").get<std::vector<double>>());
  }
  throw ParseError("unknown coefficient form '" + form + "'");
}

}  // namespace

std::vector<double> vector_field(const LieSystem& sys, double t, std::span<const double> x) {
  sys.space.require_in_domain(x);
  std::vector<double> out(sys.n());
  vector_field_into(sys, t, x, out);
  return out;
}

void vector_field_into(const LieSystem& sys, double t, std::span<const double> x,
                       std::span<double> out) {
  std::vector<double> bvals;
  evaluate_b(sys, t, bvals);
  field_with_b(sys, bvals, x, out);
}

ProlongedSystem prolong(const LieSystem& sys, int m) {
  if (m < 1) throw InvalidArgument("prolongation needs m >= 1");
  ProlongedSystem p;
  p.base = sys;
  p.m = m;
  p.space = power(sys.space, m);
  if (sys.realization) p.manifold = power(sys.realization->manifold, m);
  return p;
}

std::vector<double> vector_field(const ProlongedSystem& sys, double t, std::span<const double> x) {
  sys.space.require_in_domain(x);
  std::vector<double> out(x.size());
  vector_field_into(sys, t, x, out);
  return out;
}

void vector_field_into(const ProlongedSystem& sys, double t, std::span<const double> x,
                       std::span<double> out) {
  const int n = sys.base.n();
  std::vector<double> bvals;
  evaluate_b(sys.base, t, bvals);
  for (int a = 0; a < sys.m; ++a) {
    field_with_b(sys.base, bvals, x.subspan(a * n, n), out.subspan(a * n, n));
  }
}

std::vector<std::string> system_names() {
  std::vector<std::string> v;
  for (const auto& it : items()) v.emplace_back(it.name);
  return v;
}

std::vector<std::string> coefficient_names(std::string_view name) { return find_item(name).curves; }

LieSystem catalog(std::string_view name, const SystemParams& params) {
  return find_item(name).make(params);
}

LieSystem system_from_json(std::string_view descriptor) {
  json j;
  try {
    j = json::parse(descriptor);
  } catch (const json::exception& e) {
    throw ParseError(std::string("system descriptor: ") + e.what());
  }
  if (!j.is_object() || !j.contains("name") || !j.at("name").is_string()) {
    throw ParseError("system descriptor needs a string \"name\"");
  }
  const std::string name = j.at("name").get<std::string>();
  const CatalogItem& item = find_item(name);
  SystemParams p;
  try {
    if (j.contains("params")) {
      for (const auto& [k, v] : j.at("params").items()) {
        if (v.is_number()) {
          p.values[k] = v.get<double>();
        } else if (v.is_array()) {
          p.lists[k] = v.get<std::vector<double>>();
        } else if (v.is_string() || v.is_object()) {
          p.curves.insert_or_assign(k, curve_from_json(v));
        } else {
          throw ParseError("parameter '" + k + "' has an unsupported type");
        }
      }
    }
    if (j.contains("coefficients")) {
      const json& c = j.at("coefficients");
      if (c.is_array()) {
        if (c.size() > item.curves.size()) {
          throw InvalidArgument(name + " takes at most " + std::to_string(item.curves.size()) +
                                " coefficient curves");
        }
        for (std::size_t i = 0; i < c.size(); ++i) {
          p.curves.insert_or_assign(item.curves[i], curve_from_json(c[i]));
        }
      } else if (c.is_object()) {
        for (const auto& [k, v] : c.items()) p.curves.insert_or_assign(k, curve_from_json(v));
      } else {
        throw ParseError("\"coefficients\" must be an array or an object");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("system descriptor: ") + e.what());
  }
  return item.make(p);
}

std::string describe_json(const LieSystem& sys) {
  json j;
  j["name"] = sys.name;
  j["notes"] = sys.notes;
  j["state_dim"] = sys.n();
  j["coordinates"] = sys.space.names;
  j["domain"] = sys.space.domain_description;
  j["sampling_box"] = {{"lo", sys.space.box_lo}, {"hi", sys.space.box_hi}};
  j["algebra"] = sys.algebra;
  j["lie_hamilton"] = sys.is_hamiltonian();
  j["generators"] = sys.generator_text;
  j["coefficients"] = sys.b_text;
  j["curves"] = sys.curves;
  j["params"] = sys.params;
  if (sys.realization) {
    json bv = json::array();
    bv.push_back(sys.realization->manifold.bivector.description);
    for (const auto& alt : sys.alternate_realizations) bv.push_back(alt.manifold.bivector.description);
    j["bivectors"] = bv;
  }
  j["casimir"] = sys.casimir ? json(to_string(*sys.casimir)) : json(nullptr);
  j["superposition_rule"] = sys.rule.empty() ? json(nullptr) : json(sys.rule);
  j["homomorphism_tol"] = sys.homomorphism_tol;
  return j.dump(2);
}

LieSystem with_coefficients(const LieSystem& sys, std::vector<CoefficientFn> b,
                            std::vector<std::string> text) {
  if (static_cast<int>(b.size()) != sys.r()) {
    throw ShapeError("expected " + std::to_string(sys.r()) + " coefficients, got " +
                     std::to_string(b.size()));
  }
  LieSystem out = sys;
  out.b = std::move(b);
  out.b_text = std::move(text);
  out.b_text.resize(out.b.size(), "custom");
  out.curves.clear();
  return out;
}

}  // namespace lhk
