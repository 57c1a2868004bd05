#include "lhk/superposition.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>

#include "lhk/error.hpp"

namespace lhk {

using json = nlohmann::ordered_json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Square root tolerating roundoff-sized negative arguments relative to the
// magnitude of the terms that produced them.
double safe_sqrt(double v, double scale, const char* what) {
  if (v >= 0.0) return std::sqrt(v);
  if (v > -1e-10 * std::max(1.0, scale)) return 0.0;
  throw NegativeRadicandError(std::string(what) + " radicand " + format_double(v) + " < 0");
}

double checked_div(double num, double den, double scale, const char* what) {
  if (!(std::abs(den) > 1e-14 * std::max(1.0, scale))) {
    throw ZeroDenominatorError(std::string(what) + " denominator vanishes");
  }
  return num / den;
}

int sign_of(const Branch& b, std::size_t i) {
  if (i >= b.size() || (b[i] != 1 && b[i] != -1)) {
    throw InvalidArgument("branch entries must be +1 or -1");
  }
  return b[i];
}

double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a - std::numbers::pi;
}

std::array<double, 3> su2_vector(double x, double p) {
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  return {-s * std::cos(p), -s * std::sin(p), x};
}

double triple(const std::array<double, 3>& a, const std::array<double, 3>& b,
              const std::array<double, 3>& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

}  // namespace

double riccati_rule(double x1, double x2, double x3, double k) {
  if (x1 == x2 || x2 == x3 || x1 == x3) {
    throw DegenerateInputError("riccati rule needs three distinct particular solutions");
  }
  const double den = (x3 - x2) + k * (x1 - x2);
  const double scale = std::abs(x3 - x2) + std::abs(k * (x1 - x2));
  if (!(std::abs(den) > 1e-14 * std::max(1.0, scale))) {
    throw DegenerateInputError("riccati rule denominator (x3-x2) + k(x1-x2) vanishes");
  }
  return (x1 * (x3 - x2) + k * x3 * (x1 - x2)) / den;
}

double riccati_constant(double x1, double x2, double x3, double x) {
  const double den = (x1 - x2) * (x3 - x);
  if (den == 0.0 || x2 == x3 || x1 == x3) {
    throw DegenerateInputError("cross ratio needs pairwise distinct points");
  }
  return (x1 - x) * (x2 - x3) / den;
}

double kummer_schwarz_f2(double x1, double p1, double x2, double p2, double b0) {
  const double a = p1 * x1 * x1 - p2 * x2 * x2;
  return (b0 * (x1 + x2) * (x1 + x2) + a * a) / (x1 * x2);
}

double milne_pinney_f2(double x1, double p1, double x2, double p2, double b) {
  const double w = x1 * p2 - x2 * p1;
  const double s = x1 * x1 + x2 * x2;
  return 0.25 * w * w + b * s * s / (4.0 * x1 * x1 * x2 * x2);
}

double trig_su2_f2(double x1, double p1, double x2, double p2) {
  const double s1 = std::sqrt(1.0 - x1 * x1);
  const double s2 = std::sqrt(1.0 - x2 * x2);
  return 2.0 * (s1 * s2 * std::cos(p1 - p2) + x1 * x2 + 1.0);
}

std::vector<Branch> branches(const std::string& rule) {
  if (rule == "riccati") return {{}};
  if (rule == "trig-su2") return {{1}, {-1}};
  if (rule == "kummer-schwarz") return {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  if (rule == "milne-pinney") {
    std::vector<Branch> v;
    for (int a : {1, -1}) {
      for (int b : {1, -1}) {
        for (int c : {1, -1}) v.push_back({a, b, c});
      }
    }
    return v;
  }
  throw CatalogError("unknown superposition rule '" + rule + "'");
}

PhasePoint kummer_schwarz_rule(double x2, double p2, double x3, double p3, double k1, double k2,
                               double b0, const Branch& branch) {
  const int sx = sign_of(branch, 0);
  const int sp = sign_of(branch, 1);
  const double A = p2 * x2 * x2 - p3 * x3 * x3;
  const double Bp = k1 * x2 + k2 * x3;
  const double Bm = k1 * x2 - k2 * x3;
  PhasePoint out;
  if (b0 == 0.0) {
    const double g = k1 * k2 * x2 * x3;
    const double Q = Bp + sx * 2.0 * safe_sqrt(g, std::abs(g), "k1 k2 x2 x3");
    out.x = checked_div(A * A * Q, Bm * Bm, A * A * std::abs(Q), "B-^2");
    const double r = k1 * x2 * Q;
    const double root = safe_sqrt(r, std::abs(k1 * x2) * (std::abs(Bp) + std::abs(Q)), "k1 x2 Q");
    const double num = Bm * Bm * Bm * (Bm * p2 * x2 * x2 + sp * A * root);
    out.p = checked_div(num, A * A * A * A * Q * Q, std::abs(num), "A^4 Q^2");
    return out;
  }
  const double d2 = x2 * x2 - x3 * x3;
  const double t1 = A * A * (k1 * k2 * x2 * x3 - 2.0 * b0 * b0 * (x2 * x2 + x3 * x3) - b0 * A * A);
  const double t2 = b0 * x2 * x3 * Bm * (k2 * x2 - k1 * x3);
  const double t3 = b0 * b0 * b0 * d2 * d2;
  const double ups = t1 + t2 - t3;
  const double su = safe_sqrt(ups, std::abs(t1) + std::abs(t2) + std::abs(t3), "Upsilon");
  const double num = A * A * Bp + b0 * Bm * d2 + sx * 2.0 * A * su;
  const double den = Bm * Bm + 4.0 * b0 * A * A;
  out.x = checked_div(num, den, Bm * Bm + std::abs(4.0 * b0 * A * A), "B-^2 + 4 b0 A^2");
  const double x1 = out.x;
  if (x1 == 0.0) throw ZeroDenominatorError("reconstructed x1 vanishes");
  const double r1 = k1 * x1 * x2;
  const double r2 = b0 * (x1 * x1 + x2 * x2);
  const double root = safe_sqrt(r1 - r2, std::abs(r1) + std::abs(r2), "k1 x1 x2 - b0 (x1^2 + x2^2)");
  out.p = (p2 * x2 * x2 + sp * root) / (x1 * x1);
  return out;
}

PhasePoint milne_pinney_rule(double x2, double p2, double x3, double p3, double k1, double k2,
                             double k3, double b, const Branch& branch) {
  const int so = sign_of(branch, 0);
  const int si = sign_of(branch, 1);
  const int sp = sign_of(branch, 2);
  (void)p3;
  const double d = 4.0 * b * b - k3 * k3;
  if (!(std::abs(d) > 1e-12 * std::max(1.0, 4.0 * b * b + k3 * k3))) {
    throw SingularConstantsError("4 b^2 - k3^2 vanishes; Milne-Pinney constants are singular");
  }
  const double mu1 = (2.0 * b * k1 - k2 * k3) / d;
  const double mu2 = (2.0 * b * k2 - k1 * k3) / d;
  const double mu =
      4.0 * (4.0 * b * b * b + k1 * k2 * k3 - b * (k1 * k1 + k2 * k2 + k3 * k3)) / (d * d);
  const double x22 = x2 * x2, x33 = x3 * x3;
  const double inner_a = k3 * x22 * x33;
  const double inner_b = b * (x22 * x22 + x33 * x33);
  const double inner = mu * (inner_a - inner_b);
  const double iroot =
      safe_sqrt(inner, std::abs(mu) * (std::abs(inner_a) + std::abs(inner_b)), "mu (k3 x2^2 x3^2 - b (x2^4 + x3^4))");
  const double oa = mu1 * x22, ob = mu2 * x33;
  const double outer = oa + ob + si * iroot;
  const double x1 = so * safe_sqrt(outer, std::abs(oa) + std::abs(ob) + iroot, "x1^2");
  if (x1 == 0.0 || x2 == 0.0) throw ZeroDenominatorError("x1 x2^2 vanishes");
  const double x11 = x1 * x1;
  const double r1 = k1 * x11 * x22;
  const double r2 = b * (x11 * x11 + x22 * x22);
  const double root = safe_sqrt(r1 - r2, std::abs(r1) + std::abs(r2), "k1 x1^2 x2^2 - b (x1^4 + x2^4)");
  return {x1, (p2 * x11 * x2 + sp * root) / (x1 * x22)};
}

std::vector<TrigRoot> trig_su2_roots(double x2, double p2, double x3, double p3, double k1,
                                     double k2) {
  const double s2 = std::sqrt(1.0 - x2 * x2);
  const double s3 = std::sqrt(1.0 - x3 * x3);
  auto residual = [&](double x, double p, double& g1, double& g2) {
    const double s = std::sqrt(1.0 - x * x);
    g1 = 2.0 * (s * s2 * std::cos(p - p2) + x * x2 + 1.0) - k1;
    g2 = 2.0 * (s * s3 * std::cos(p - p3) + x * x3 + 1.0) - k2;
  };
  std::vector<TrigRoot> roots;
  constexpr int kNx = 9, kNp = 12;
  for (int ix = 0; ix < kNx; ++ix) {
    for (int ip = 0; ip < kNp; ++ip) {
      double x = -0.9 + 1.8 * ix / (kNx - 1);
      double p = -std::numbers::pi + kTwoPi * ip / kNp;
      double g1 = 0.0, g2 = 0.0;
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        residual(x, p, g1, g2);
        if (std::max(std::abs(g1), std::abs(g2)) < 1e-13) {
          converged = true;
          break;
        }
        const double s = std::sqrt(1.0 - x * x);
        const double j11 = 2.0 * (-x / s * s2 * std::cos(p - p2) + x2);
        const double j12 = -2.0 * s * s2 * std::sin(p - p2);
        const double j21 = 2.0 * (-x / s * s3 * std::cos(p - p3) + x3);
        const double j22 = -2.0 * s * s3 * std::sin(p - p3);
        const double det = j11 * j22 - j12 * j21;
        if (!(std::abs(det) > 1e-300)) break;
        double dx = (j22 * g1 - j12 * g2) / det;
        double dp = (-j21 * g1 + j11 * g2) / det;
        // Damp steps that would leave the strip |x| < 1.
        double lam = 1.0;
        while (std::abs(x - lam * dx) >= 1.0 && lam > 1e-6) lam *= 0.5;
        x -= lam * dx;
        p = wrap_angle(p - lam * dp);
      }
      if (!converged) {
        residual(x, p, g1, g2);
        converged = std::max(std::abs(g1), std::abs(g2)) < 1e-10;
      }
      if (!converged || !std::isfinite(x) || std::abs(x) >= 1.0) continue;
      const bool dup = std::any_of(roots.begin(), roots.end(), [&](const TrigRoot& r) {
        return std::abs(r.point.x - x) < 1e-7 && std::abs(wrap_angle(r.point.p - p)) < 1e-7;
      });
      if (dup) continue;
      TrigRoot r;
      r.point = {x, p};
      r.residual = std::max(std::abs(g1), std::abs(g2));
      const double tp = triple(su2_vector(x, p), su2_vector(x2, p2), su2_vector(x3, p3));
      r.label = tp > 0 ? 1 : (tp < 0 ? -1 : 0);
      roots.push_back(r);
    }
  }
  if (roots.empty()) throw NoConvergenceError("trig-su2 Newton iteration found no root");
  return roots;
}

PhasePoint trig_su2_rule(double x2, double p2, double x3, double p3, double k1, double k2,
                         int label) {
  const auto roots = trig_su2_roots(x2, p2, x3, p3, k1, k2);
  if (label == 0) return roots.front().point;
  for (const auto& r : roots) {
    if (r.label == label) return r.point;
  }
  throw NoConvergenceError("no trig-su2 root with label " + std::to_string(label));
}

int particular_count(const std::string& rule) {
  if (rule == "riccati") return 3;
  if (rule == "kummer-schwarz" || rule == "milne-pinney" || rule == "trig-su2") return 2;
  throw CatalogError("unknown superposition rule '" + rule + "'");
}

namespace {

double system_param(const LieSystem& sys, const char* key) {
  auto it = sys.params.find(key);
  if (it == sys.params.end()) throw InvalidArgument(sys.name + " has no parameter " + key);
  return it->second;
}

void require_rule(const LieSystem& sys, const std::string& rule) {
  particular_count(rule);
  if (sys.rule != rule) {
    throw InvalidArgument("system " + sys.name + " does not carry the " + rule +
                          " superposition rule");
  }
}

// Realized two-copy Casimir D(Delta(C)) on copies i and j of a prolonged state.
double pair_invariant(const LieSystem& sys, const SymPoly& f2, std::span<const double> state,
                      int i, int j) {
  const int n = sys.n();
  std::vector<double> pts(2 * n);
  std::copy_n(state.begin() + i * n, n, pts.begin());
  std::copy_n(state.begin() + j * n, n, pts.begin() + n);
  return realize_eval(f2, *sys.realization, pts);
}

}  // namespace

SuperpositionConstants constants_at(const std::string& rule, const LieSystem& sys,
                                    std::span<const double> state) {
  require_rule(sys, rule);
  const int m = particular_count(rule) + 1;
  if (static_cast<int>(state.size()) != m * sys.n()) {
    throw ShapeError("expected a state of " + std::to_string(m) + " copies");
  }
  SuperpositionConstants k;
  k.rule = rule;
  if (rule == "riccati") {
    k.names = {"k"};
    k.values = {riccati_constant(state[1], state[2], state[3], state[0])};
    return k;
  }
  const SymPoly f2 = coproduct(*sys.casimir, 2);
  const double f12 = pair_invariant(sys, f2, state, 0, 1);
  const double f13 = pair_invariant(sys, f2, state, 0, 2);
  if (rule == "kummer-schwarz") {
    const double b0 = system_param(sys, "b0");
    k.parameter = b0;
    k.names = {"k1", "k2"};
    k.values = {f12 - 2.0 * b0, f13 - 2.0 * b0};
  } else if (rule == "milne-pinney") {
    const double b = system_param(sys, "b");
    const double f23 = pair_invariant(sys, f2, state, 1, 2);
    k.parameter = b;
    k.names = {"k1", "k2", "k3"};
    k.values = {4.0 * f12 - 2.0 * b, 4.0 * f13 - 2.0 * b, 4.0 * f23 - 2.0 * b};
  } else {
    k.names = {"k1", "k2"};
    k.values = {f12, f13};
  }
  return k;
}

SuperpositionConstants extract_constants(const std::string& rule, const LieSystem& sys,
                                         const Trajectory& prolonged,
                                         std::span<const double> sample_times, double max_spread) {
  if (sample_times.empty()) throw InvalidArgument("extract_constants needs sample times");
  std::vector<SuperpositionConstants> ks;
  for (double t : sample_times) ks.push_back(constants_at(rule, sys, prolonged.at(t)));
  SuperpositionConstants out = ks.front();
  for (std::size_t c = 0; c < out.values.size(); ++c) {
    double lo = ks[0].values[c], hi = lo, sum = 0.0;
    for (const auto& k : ks) {
      lo = std::min(lo, k.values[c]);
      hi = std::max(hi, k.values[c]);
      sum += k.values[c];
    }
    out.values[c] = sum / ks.size();
    out.spread = std::max(out.spread, (hi - lo) / std::max(1.0, std::abs(out.values[c])));
  }
  if (!(out.spread <= max_spread)) {
    throw DriftTooLargeError("superposition constants disagree across sample times (relative "
                             "spread " + format_double(out.spread) + " > " +
                             format_double(max_spread) + ")");
  }
  return out;
}

namespace {

// Largest relative mismatch between the constants and the pair invariants of
// a candidate copy 1 against the particulars.
double constant_residual(const std::string& rule, const SuperpositionConstants& k,
                         std::span<const double> c, std::span<const double> q) {
  double worst = 0.0;
  auto note = [&](double value, double want) {
    const double r = std::abs(value - want) / std::max(1.0, std::abs(want));
    worst = std::max(worst, std::isfinite(r) ? r : std::numeric_limits<double>::infinity());
  };
  if (rule == "kummer-schwarz") {
    const double b0 = k.parameter;
    note(kummer_schwarz_f2(c[0], c[1], q[0], q[1], b0) - 2.0 * b0, k[0]);
    note(kummer_schwarz_f2(c[0], c[1], q[2], q[3], b0) - 2.0 * b0, k[1]);
  } else {
    const double b = k.parameter;
    note(4.0 * milne_pinney_f2(c[0], c[1], q[0], q[1], b) - 2.0 * b, k[0]);
    note(4.0 * milne_pinney_f2(c[0], c[1], q[2], q[3], b) - 2.0 * b, k[1]);
  }
  return worst;
}

}  // namespace

std::vector<Candidate> reconstruct(const std::string& rule, const SuperpositionConstants& k,
                                   std::span<const double> q) {
  std::vector<Candidate> out;
  std::exception_ptr last;
  const std::vector<Branch> bs = branches(rule);
  for (std::size_t bi = 0; bi < bs.size(); ++bi) {
    try {
      if (rule == "riccati") {
        out.push_back({{riccati_rule(q[0], q[1], q[2], k[0])}, 0});
      } else if (rule == "kummer-schwarz") {
        const PhasePoint r = kummer_schwarz_rule(q[0], q[1], q[2], q[3], k[0], k[1], k.parameter, bs[bi]);
        if (std::isfinite(r.x) && std::isfinite(r.p)) out.push_back({{r.x, r.p}, static_cast<int>(bi)});
      } else if (rule == "milne-pinney") {
        const PhasePoint r =
            milne_pinney_rule(q[0], q[1], q[2], q[3], k[0], k[1], k[2], k.parameter, bs[bi]);
        if (std::isfinite(r.x) && std::isfinite(r.p)) out.push_back({{r.x, r.p}, static_cast<int>(bi)});
      } else {
        // Both labels come from one root search.
        for (const auto& root : trig_su2_roots(q[0], q[1], q[2], q[3], k[0], k[1])) {
          out.push_back({{root.point.x, root.point.p}, root.label > 0 ? 0 : 1});
        }
        break;
      }
    } catch (const Error&) {
      last = std::current_exception();
    }
  }
  if (out.empty()) {
    if (last) std::rethrow_exception(last);
    throw NoConvergenceError("no reconstruction candidate");
  }
  // The closed forms square twice, so some sign choices solve only one of the
  // defining equations. Drop those, keeping the best candidate if none fit.
  if (rule == "kummer-schwarz" || rule == "milne-pinney") {
    std::vector<double> res;
    for (const auto& c : out) res.push_back(constant_residual(rule, k, c.state, q));
    const double best = *std::min_element(res.begin(), res.end());
    const double cut = std::max(1e-6, 10.0 * best);
    std::vector<Candidate> kept;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (res[i] <= cut) kept.push_back(out[i]);
    }
    out = std::move(kept);
  }
  return out;
}

namespace {

double state_distance(const std::string& rule, std::span<const double> a,
                      std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    if (rule == "trig-su2" && i == 1) d = wrap_angle(d);
    s += d * d;
  }
  return std::sqrt(s);
}

[[noreturn]] void rethrow_at(const Error& e, double t) {
  const std::string msg = std::string(e.what()) + " (at t = " + format_double(t) + ")";
  const std::string& kind = e.kind();
  if (kind == "NegativeRadicandError") throw NegativeRadicandError(msg);
  if (kind == "ZeroDenominatorError") throw ZeroDenominatorError(msg);
  if (kind == "DegenerateInputError") throw DegenerateInputError(msg);
  if (kind == "SingularConstantsError") throw SingularConstantsError(msg);
  if (kind == "NoConvergenceError") throw NoConvergenceError(msg);
  throw;
}

std::vector<std::vector<double>> sample_initial(const LieSystem& sys, const std::string& rule,
                                                int copies, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::vector<double>> init;
    for (int c = 0; c < copies; ++c) init.push_back(sample_point(sys.space, rng, sys.sample_margin));
    bool ok = true;
    if (rule == "riccati") {
      for (int i = 0; i < copies && ok; ++i) {
        for (int j = i + 1; j < copies && ok; ++j) ok = std::abs(init[i][0] - init[j][0]) >= 0.1;
      }
    }
    if (ok) return init;
  }
  throw InvalidArgument("could not sample separated initial conditions");
}

}  // namespace

VerifyReport verify_rule(const LieSystem& sys, const std::string& rule, const VerifyOptions& opts) {
  require_rule(sys, rule);
  if (!(opts.t1 > opts.t0)) throw InvalidArgument("verify_rule needs t1 > t0");
  if (opts.grid < 3) throw InvalidArgument("verify_rule needs at least 3 grid points");
  if (!(opts.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  const int np = particular_count(rule);
  const int m = np + 1;
  const int n = sys.n();

  VerifyReport rep;
  rep.rule = rule;
  rep.system = sys.name;
  rep.params = sys.params;
  rep.curves = sys.curves;
  rep.n_particular = np;
  rep.tol = opts.tol;
  for (int i = 0; i < opts.grid; ++i) {
    rep.times.push_back(opts.t0 + (opts.t1 - opts.t0) * i / (opts.grid - 1));
  }
  rep.times.back() = opts.t1;

  const ProlongedSystem ps = prolong(sys, m);
  const OdeSystem ode = as_ode(ps);
  Rng rng(opts.seed);
  Trajectory traj;
  bool done = false;
  const int attempts = opts.initial.empty() ? std::max(1, opts.max_attempts) : 1;
  for (int a = 0; a < attempts && !done; ++a) {
    rep.attempts = a + 1;
    rep.initial = opts.initial.empty() ? sample_initial(sys, rule, m, rng) : opts.initial;
    if (static_cast<int>(rep.initial.size()) != m) {
      throw ShapeError(rule + " needs " + std::to_string(m) + " initial conditions");
    }
    std::vector<double> x0;
    for (const auto& c : rep.initial) {
      if (static_cast<int>(c.size()) != n) throw ShapeError("initial condition has wrong dimension");
      x0.insert(x0.end(), c.begin(), c.end());
    }
    try {
      traj = integrate(ode, x0, opts.t0, opts.t1, opts.method, rep.times);
      done = true;
    } catch (const DomainExitError&) {
      if (a + 1 == attempts) throw;
    } catch (const StepUnderflowError&) {
      if (a + 1 == attempts) throw;
    }
  }

  const double mid = rep.times[rep.times.size() / 2];
  const std::vector<double> samples = {opts.t0, mid, opts.t1};
  rep.constants = extract_constants(rule, sys, traj, samples);

  // Branches are followed by continuity: the candidate nearest to a linear
  // extrapolation of the last two accepted points wins. Plain nearest-to-
  // previous selection picks the wrong sign whenever a root crosses zero.
  std::vector<double> prev = rep.initial.front();
  std::vector<double> prev2;
  double t_prev = opts.t0, t_prev2 = opts.t0;
  int prev_branch = -1;
  for (double t : rep.times) {
    const Point s = traj.at(t);
    const std::span<const double> all(s);
    std::vector<Candidate> cands;
    try {
      cands = reconstruct(rule, rep.constants, all.subspan(n));
    } catch (const Error& e) {
      rethrow_at(e, t);
    }
    std::vector<double> guess = prev;
    if (!prev2.empty() && t_prev > t_prev2) {
      const double w = (t - t_prev) / (t_prev - t_prev2);
      for (int i = 0; i < n; ++i) {
        double d = prev[i] - prev2[i];
        if (rule == "trig-su2" && i == 1) d = wrap_angle(d);
        guess[i] = prev[i] + w * d;
      }
    }
    const Candidate* best = &cands.front();
    double best_d = state_distance(rule, best->state, guess);
    for (const auto& c : cands) {
      const double d = state_distance(rule, c.state, guess);
      if (d < best_d) {
        best = &c;
        best_d = d;
      }
    }
    const double err = state_distance(rule, best->state, all.subspan(0, n));
    rep.errors.push_back(err);
    rep.max_error = std::max(rep.max_error, std::isnan(err) ? std::numeric_limits<double>::infinity() : err);
    rep.branch.push_back(best->branch);
    if (prev_branch >= 0 && best->branch != prev_branch) rep.branch_switch_times.push_back(t);
    prev_branch = best->branch;
    if (t > t_prev || prev2.empty()) {
      prev2 = prev;
      t_prev2 = t_prev;
    }
    prev = best->state;
    t_prev = t;
  }
  rep.pass = rep.max_error < opts.tol;
  return rep;
}

std::string VerifyReport::to_json() const {
  json j;
  j["rule"] = rule;
  j["system"] = system;
  j["params"] = params;
  j["curves"] = curves;
  j["pass"] = pass;
  j["n_particular"] = n_particular;
  j["tol"] = tol;
  j["max_error"] = max_error;
  j["grid_points"] = times.size();
  j["attempts"] = attempts;
  json consts = json::object();
  for (std::size_t i = 0; i < constants.names.size(); ++i) consts[constants.names[i]] = constants.values[i];
  j["constants"] = consts;
  j["constant_spread"] = constants.spread;
  j["initial_conditions"] = initial;
  j["branch_switch_times"] = branch_switch_times;
  j["per_time_errors_csv_path"] = errors_csv_path.empty() ? json(nullptr) : json(errors_csv_path);
  return j.dump(2);
}

std::string VerifyReport::errors_csv() const {
  std::ostringstream os;
  os << "t,error,branch\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << format_double(times[i]) << ',' << format_double(errors[i]) << ',' << branch[i] << '\n';
  }
  return os.str();
}

}  // namespace lhk
