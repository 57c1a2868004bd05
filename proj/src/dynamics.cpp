#include "lhk/dynamics.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include <Eigen/Dense>

#include "lhk/error.hpp"

namespace lhk {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

OdeSystem as_ode(const LieSystem& sys) {
  OdeSystem o;
  o.name = sys.name;
  o.space = sys.space;
  o.rhs = [sys](double t, std::span<const double> x, std::span<double> dx) {
    vector_field_into(sys, t, x, dx);
  };
  return o;
}

OdeSystem as_ode(const ProlongedSystem& sys) {
  OdeSystem o;
  o.name = sys.base.name;
  o.space = sys.space;
  o.m = sys.m;
  o.rhs = [sys](double t, std::span<const double> x, std::span<double> dx) {
    vector_field_into(sys, t, x, dx);
  };
  return o;
}

std::string describe(const Method& method) {
  if (const auto* r = std::get_if<Rk4>(&method)) return "rk4(h=" + format_double(r->h) + ")";
  const auto& f = std::get<Rkf45>(method);
  return "rkf45(atol=" + format_double(f.atol) + ",rtol=" + format_double(f.rtol) + ")";
}

Point Trajectory::at(double t) const {
  if (times.empty()) throw GridMismatchError("empty trajectory");
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  if (t < times.front() - slack || t > times.back() + slack) {
    throw GridMismatchError("time " + format_double(t) + " outside trajectory span [" +
                            format_double(times.front()) + ", " + format_double(times.back()) +
                            "]");
  }
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return states.back();
  std::size_t i = it - times.begin();
  if (*it == t || i == 0) return states[i];
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  Point p(states[i].size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = (1.0 - w) * states[i - 1][k] + w * states[i][k];
  }
  return p;
}

std::vector<double> Trajectory::copy(std::size_t i, int a) const {
  const std::size_t n = states[i].size() / m;
  return {states[i].begin() + a * n, states[i].begin() + (a + 1) * n};
}

namespace {

struct StepCheck {
  bool ok;
  int coordinate;
};

StepCheck check_state(const PhaseSpace& space, std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) return {false, static_cast<int>(i)};
  }
  if (space.domain) {
    const DomainCheck c = space.domain(x);
    if (!(c.margin > 0.0)) return {false, c.coordinate};
  }
  return {true, -1};
}

[[noreturn]] void domain_exit(const OdeSystem& sys, double t, const Point& x, int coordinate) {
  std::string msg = sys.name + ": solution left the domain (" + sys.space.domain_description +
                    ") near t = " + format_double(t);
  if (coordinate >= 0 && coordinate < static_cast<int>(sys.space.names.size())) {
    msg += " through coordinate " + sys.space.names[coordinate];
  }
  throw DomainExitError(msg, t, x, coordinate);
}

class Stepper {
 public:
  explicit Stepper(const OdeSystem& sys) : sys_(sys), n_(sys.dim()) {
    for (auto& k : k_) k.resize(n_);
    tmp_.resize(n_);
  }

  Point rk4(double t, const Point& x, double h) {
    sys_.rhs(t, x, k_[0]);
    offset(x, 0.5 * h, k_[0]);
    sys_.rhs(t + 0.5 * h, tmp_, k_[1]);
    offset(x, 0.5 * h, k_[1]);
    sys_.rhs(t + 0.5 * h, tmp_, k_[2]);
    offset(x, h, k_[2]);
    sys_.rhs(t + h, tmp_, k_[3]);
    Point y(n_);
    for (int i = 0; i < n_; ++i) {
      y[i] = x[i] + h / 6.0 * (k_[0][i] + 2.0 * k_[1][i] + 2.0 * k_[2][i] + k_[3][i]);
    }
    return y;
  }

  // Returns the fifth-order solution and writes the scaled error norm.
  Point rkf45(double t, const Point& x, double h, const Rkf45& opt, double& err) {
    static constexpr double c[6] = {0.0, 1.0 / 4, 3.0 / 8, 12.0 / 13, 1.0, 1.0 / 2};
    static constexpr double a[6][5] = {
        {},
        {1.0 / 4},
        {3.0 / 32, 9.0 / 32},
        {1932.0 / 2197, -7200.0 / 2197, 7296.0 / 2197},
        {439.0 / 216, -8.0, 3680.0 / 513, -845.0 / 4104},
        {-8.0 / 27, 2.0, -3544.0 / 2565, 1859.0 / 4104, -11.0 / 40}};
    static constexpr double b5[6] = {16.0 / 135,      0.0,         6656.0 / 12825,
                                     28561.0 / 56430, -9.0 / 50.0, 2.0 / 55};
    static constexpr double e[6] = {1.0 / 360,         0.0,        -128.0 / 4275,
                                    -2197.0 / 75240.0, 1.0 / 50.0, 2.0 / 55};
    for (int s = 0; s < 6; ++s) {
      for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += a[s][j] * k_[j][i];
        tmp_[i] = x[i] + h * acc;
      }
      sys_.rhs(t + c[s] * h, tmp_, k_[s]);
    }
    Point y(n_);
    err = 0.0;
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0, est = 0.0;
      for (int s = 0; s < 6; ++s) {
        acc += b5[s] * k_[s][i];
        est += e[s] * k_[s][i];
      }
      y[i] = x[i] + h * acc;
      const double scale = opt.atol + opt.rtol * std::max(std::abs(x[i]), std::abs(y[i]));
      const double r = std::abs(h * est) / scale;
      err = std::max(err, std::isfinite(r) ? r : std::numeric_limits<double>::infinity());
    }
    return y;
  }

  std::vector<double> derivative(double t, const Point& x) {
    std::vector<double> d(n_);
    sys_.rhs(t, x, d);
    return d;
  }

 private:
  void offset(const Point& x, double s, const std::vector<double>& k) {
    for (int i = 0; i < n_; ++i) tmp_[i] = x[i] + s * k[i];
  }

  const OdeSystem& sys_;
  int n_;
  std::vector<double> k_[6];
  std::vector<double> tmp_;
};

std::vector<double> sorted_stops(std::span<const double> stops, double t0, double t1) {
  std::vector<double> s;
  for (double v : stops) {
    if (v > t0 && v < t1) s.push_back(v);
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  s.push_back(t1);
  return s;
}

void integrate_rk4(const OdeSystem& sys, Trajectory& tr, double t1, const Rk4& opt,
                   const std::vector<double>& stops) {
  if (!(opt.h > 0.0)) throw InvalidArgument("rk4 step must be positive");
  Stepper st(sys);
  double t = tr.times.back();
  Point x = tr.states.back();
  std::size_t next = 0;
  while (t < t1) {
    const double target = stops[next];
    double h = opt.h;
    bool lands = false;
    if (t + h >= target - 1e-12 * std::max(1.0, std::abs(target))) {
      h = target - t;
      lands = true;
    }
    Point y = st.rk4(t, x, h);
    StepCheck chk = check_state(sys.space, y);
    if (!chk.ok) {
      // Bisect the step length down to 1e-12 to locate the boundary.
      double lo = 0.0, hi = h;
      Point last = x;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        Point ym = st.rk4(t, x, mid);
        if (check_state(sys.space, ym).ok) {
          lo = mid;
          last = std::move(ym);
        } else {
          hi = mid;
        }
      }
      domain_exit(sys, t + lo, last, chk.coordinate);
    }
    t = lands ? target : t + h;
    x = std::move(y);
    tr.times.push_back(t);
    tr.states.push_back(x);
    if (lands) ++next;
  }
}

void integrate_rkf45(const OdeSystem& sys, Trajectory& tr, double t1, const Rkf45& opt,
                     const std::vector<double>& stops) {
  if (!(opt.atol > 0.0) || !(opt.rtol > 0.0)) {
    throw InvalidArgument("rkf45 tolerances must be positive");
  }
  Stepper st(sys);
  double t = tr.times.back();
  Point x = tr.states.back();
  const double span = t1 - t;
  double h = opt.h0;
  if (!(h > 0.0)) {
    // Initial guess from the size of the state and its derivative.
    const std::vector<double> f0 = st.derivative(t, x);
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(x[i]);
      d0 += (x[i] / sc) * (x[i] / sc);
      d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / x.size());
    d1 = std::sqrt(d1 / x.size());
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, span);
  }
  if (opt.hmax > 0.0) h = std::min(h, opt.hmax);
  double err_prev = 1e-4;
  bool rejected = false;
  std::size_t next = 0;
  std::size_t steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps) {
      throw StepUnderflowError(sys.name + ": step budget exhausted at t = " + format_double(t));
    }
    const double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    const double target = stops[next];
    double htry = h;
    bool lands = false;
    if (t + htry >= target) {
      htry = target - t;
      lands = true;
    }
    double err = 0.0;
    Point y = st.rkf45(t, x, htry, opt, err);
    const StepCheck chk = check_state(sys.space, y);
    if (!chk.ok) {
      if (htry <= 1e-12) domain_exit(sys, t, x, chk.coordinate);
      h = 0.5 * htry;
      rejected = true;
      continue;
    }
    if (err > 1.0) {
      const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
      h = htry * fac;
      rejected = true;
      if (h < hmin) {
        throw StepUnderflowError(sys.name + ": step size underflow at t = " + format_double(t));
      }
      continue;
    }
    // PI control on accepted steps.
    double fac = err == 0.0 ? 5.0
                            : 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
    fac = std::clamp(fac, 0.2, rejected ? 1.0 : 5.0);
    err_prev = std::max(err, 1e-4);
    rejected = false;
    t = lands ? target : t + htry;
    x = std::move(y);
    tr.times.push_back(t);
    tr.states.push_back(x);
    if (lands) {
      ++next;
      // A truncated landing step says nothing about the natural step size.
      if (htry < h) fac = std::max(fac, 1.0);
      h = std::max(h, htry * fac);
    } else {
      h = htry * fac;
    }
    if (opt.hmax > 0.0) h = std::min(h, opt.hmax);
  }
}

}  // namespace

Trajectory integrate(const OdeSystem& sys, std::span<const double> x0, double t0, double t1,
                     const Method& method, std::span<const double> stops) {
  if (!(t1 > t0)) throw InvalidArgument("integration needs t1 > t0");
  sys.space.require_in_domain(x0);
  Trajectory tr;
  tr.names = sys.space.names;
  tr.system = sys.name;
  tr.m = sys.m;
  tr.integrator = describe(method);
  tr.times.push_back(t0);
  tr.states.emplace_back(x0.begin(), x0.end());
  const std::vector<double> st = sorted_stops(stops, t0, t1);
  if (const auto* r = std::get_if<Rk4>(&method)) {
    integrate_rk4(sys, tr, t1, *r, st);
  } else {
    integrate_rkf45(sys, tr, t1, std::get<Rkf45>(method), st);
  }
  return tr;
}

void write_csv(const Trajectory& traj, std::ostream& os) {
  os << "t";
  for (const auto& n : traj.names) os << ',' << n;
  os << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << format_double(traj.times[i]);
    for (double v : traj.states[i]) os << ',' << format_double(v);
    os << '\n';
  }
}

double DriftReport::max_drift() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.max_drift);
  return m;
}

std::string DriftReport::to_json() const {
  json j = json::object();
  for (const auto& e : entries) {
    j[e.name] = {{"initial", e.initial}, {"max_drift", e.max_drift}, {"samples", e.samples}};
  }
  return j.dump(2);
}

DriftReport monitor_invariants(const Trajectory& traj, const std::vector<NamedInvariant>& invs) {
  DriftReport rep;
  if (traj.size() == 0) return rep;
  for (const auto& inv : invs) {
    DriftEntry e;
    e.name = inv.name;
    e.initial = inv.f(traj.states.front());
    const double scale = std::max(1.0, std::abs(e.initial));
    for (const auto& s : traj.states) {
      const double d = std::abs(inv.f(s) - e.initial) / scale;
      e.max_drift = std::max(e.max_drift, std::isnan(d) ? std::numeric_limits<double>::infinity() : d);
    }
    e.samples = traj.size();
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

NamedInvariant realized(std::string name, const SymPoly& p, const Realization& R) {
  return {std::move(name), realize(p, R)};
}

std::vector<NamedInvariant> casimir_invariants(const LieSystem& sys, int m) {
  if (!sys.realization || !sys.casimir) {
    throw InvalidArgument(sys.name + " has no realized Casimir");
  }
  if (m < 1) throw InvalidArgument("copy count must be >= 1");
  const Realization& R = *sys.realization;
  const SymPoly& C = *sys.casimir;
  std::vector<NamedInvariant> out;
  if (m == 1) {
    out.push_back(realized("F", C, R));
    return out;
  }
  for (int k = 2; k <= m; ++k) {
    out.push_back(realized("F^(" + std::to_string(k) + ")", embed(coproduct(C, k), m), R));
  }
  const SymPoly f2 = embed(coproduct(C, 2), m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const SymPoly s = permute_copies(f2, transposition(m, i, j));
      if (s == f2) continue;
      out.push_back(realized(
          "F^(2)_{" + std::to_string(i + 1) + std::to_string(j + 1) + "}", s, R));
    }
  }
  return out;
}

NamedInvariant lewis_riesenfeld(double b) {
  SmoothFunction f;
  f.value = [b](std::span<const double> s) {
    const double x = s[0], y = s[1], vx = s[2], vy = s[3];
    const double w = vy * x - vx * y;
    return w * w + b * (1.0 + y * y / (x * x));
  };
  f.gradient = [b](std::span<const double> s) {
    const double x = s[0], y = s[1], vx = s[2], vy = s[3];
    const double w = vy * x - vx * y;
    return std::vector<double>{2 * w * vy - 2 * b * y * y / (x * x * x), -2 * w * vx + 2 * b * y / (x * x),
                               -2 * w * y, 2 * w * x};
  };
  return {"lewis-riesenfeld", f};
}

InvolutionReport involution_check(const SymPoly& p, const SymPoly& q, const Realization& R,
                                  int samples, double tol, Rng& rng, double min_margin) {
  if (p.m() != q.m()) throw ShapeError("involution check needs equal copy counts");
  if (samples < 1) throw InvalidArgument("samples must be >= 1");
  const PoissonManifold M = power(R.manifold, p.m());
  const SmoothFunction fp = realize(p, R);
  const SmoothFunction fq = realize(q, R);
  InvolutionReport rep;
  rep.samples = samples;
  rep.tol = tol;
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_point(M.space, rng, min_margin);
    const double v = std::abs(bracket_num(M, fp, fq, x));
    rep.max_abs = std::max(rep.max_abs, std::isnan(v) ? std::numeric_limits<double>::infinity() : v);
  }
  rep.pass = rep.max_abs <= tol;
  return rep;
}

IndependenceReport independence_check(const std::vector<SmoothFunction>& fs,
                                       std::span<const int> wrt, std::span<const double> pt,
                                       const PhaseSpace& space) {
  if (fs.size() != wrt.size() || fs.empty()) {
    throw ShapeError("independence check needs as many functions as coordinates");
  }
  space.require_in_domain(pt);
  const int k = static_cast<int>(fs.size());
  Eigen::MatrixXd J(k, k);
  for (int r = 0; r < k; ++r) {
    const std::vector<double> g = fs[r].grad(pt);
    for (int c = 0; c < k; ++c) {
      if (wrt[c] < 0 || wrt[c] >= static_cast<int>(pt.size())) {
        throw ShapeError("coordinate index out of range");
      }
      J(r, c) = g[wrt[c]];
    }
  }
  IndependenceReport rep;
  rep.jacobian.resize(k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) rep.jacobian[r].push_back(J(r, c));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const Eigen::VectorXd sv = svd.singularValues();
  for (int i = 0; i < sv.size(); ++i) rep.singular_values.push_back(sv(i));
  const double smax = sv.size() ? sv(0) : 0.0;
  for (int i = 0; i < sv.size(); ++i) {
    if (smax > 0.0 && sv(i) > 1e-8 * smax) ++rep.rank;
  }
  rep.det = J.determinant();
  Eigen::MatrixXd N = J;
  for (int r = 0; r < k; ++r) {
    const double norm = N.row(r).norm();
    if (norm > 0.0) N.row(r) /= norm;
  }
  rep.det_normalized = N.determinant();
  return rep;
}

std::vector<double> LieIntegralPath::at(double t) const {
  Trajectory tr;
  tr.times = times;
  tr.states = f;
  return tr.at(t);
}

LieIntegralPath lie_integral_flow(const StructureConstants& sc, const std::vector<CoefficientFn>& b,
                                  std::span<const double> f0, double t0, double t1,
                                  const Method& method, std::span<const double> stops) {
  const int r = sc.dim();
  if (static_cast<int>(b.size()) != r || static_cast<int>(f0.size()) != r) {
    throw ShapeError("Lie-integral flow needs " + std::to_string(r) + " coefficients and f0 entries");
  }
  OdeSystem o;
  o.name = "lie-integral";
  o.space.n = r;
  for (int a = 1; a <= r; ++a) o.space.names.push_back("f" + std::to_string(a));
  o.space.domain_description = "all of R^" + std::to_string(r);
  o.rhs = [sc, b, r](double t, std::span<const double> f, std::span<double> df) {
    std::vector<double> bv(r);
    for (int a = 0; a < r; ++a) bv[a] = b[a](t);
    const Matrix<double> M = adjoint_matrix<double>(sc, bv);
    for (int a = 0; a < r; ++a) {
      double s = 0.0;
      for (int g = 0; g < r; ++g) s += M(a, g) * f[g];
      df[a] = s;
    }
  };
  Trajectory tr = integrate(o, f0, t0, t1, method, stops);
  return {std::move(tr.times), std::move(tr.states)};
}

LieIntegralReport verify_lie_integral(const LieSystem& sys, const LieIntegralPath& path,
                                      const Trajectory& traj, double tol) {
  if (!sys.realization) throw InvalidArgument(sys.name + " has no Hamiltonian realization");
  const Realization& R = *sys.realization;
  if (traj.size() == 0) throw GridMismatchError("empty trajectory");
  auto value = [&](std::size_t i) {
    const std::vector<double> f = path.at(traj.times[i]);
    if (static_cast<int>(f.size()) != R.r()) throw ShapeError("path dimension mismatch");
    double s = 0.0;
    for (int a = 0; a < R.r(); ++a) s += f[a] * R.hams[a](traj.states[i]);
    return s;
  };
  LieIntegralReport rep;
  rep.tol = tol;
  rep.initial = value(0);
  const double scale = std::max(1.0, std::abs(rep.initial));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double d = std::abs(value(i) - rep.initial) / scale;
    rep.max_drift = std::max(rep.max_drift, std::isnan(d) ? std::numeric_limits<double>::infinity() : d);
  }
  rep.samples = traj.size();
  rep.pass = rep.max_drift <= tol;
  return rep;
}

}  // namespace lhk
