#include "lhk/realization.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "lhk/error.hpp"

namespace lhk {

bool PhaseSpace::in_domain(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n) return false;
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return !domain || domain(x).margin > 0.0;
}

void PhaseSpace::require_in_domain(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n) {
    throw ShapeError("point has dimension " + std::to_string(x.size()) + ", phase space has " +
                     std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) {
      throw DomainError("coordinate " + names[i] + " is not finite", i);
    }
  }
  if (!domain) return;
  const DomainCheck c = domain(x);
  if (c.margin > 0.0) return;
  std::string msg = "point outside domain (" + domain_description + ")";
  if (c.coordinate >= 0 && c.coordinate < n) {
    msg += ": coordinate " + names[c.coordinate] + " = " + std::to_string(x[c.coordinate]);
  }
  throw DomainError(msg, c.coordinate);
}

PhaseSpace power(const PhaseSpace& space, int m) {
  if (m < 1) throw InvalidArgument("copy count must be >= 1");
  if (m == 1) return space;
  PhaseSpace out;
  const int n = space.n;
  out.n = n * m;
  for (int a = 0; a < m; ++a) {
    for (int i = 0; i < n; ++i) {
      out.names.push_back(space.names[i] + "_" + std::to_string(a + 1));
      out.box_lo.push_back(space.box_lo.empty() ? -1.0 : space.box_lo[i]);
      out.box_hi.push_back(space.box_hi.empty() ? 1.0 : space.box_hi[i]);
    }
  }
  out.domain_description = space.domain_description + " in every copy";
  if (space.domain) {
    out.domain = [base = space.domain, n, m](std::span<const double> x) {
      DomainCheck worst{std::numeric_limits<double>::infinity(), -1};
      for (int a = 0; a < m; ++a) {
        const DomainCheck c = base(x.subspan(a * n, n));
        if (c.margin < worst.margin) worst = {c.margin, c.coordinate < 0 ? -1 : a * n + c.coordinate};
      }
      return worst;
    };
  }
  return out;
}

Point sample_point(const PhaseSpace& space, Rng& rng, double min_margin) {
  Point x(space.n);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (int i = 0; i < space.n; ++i) {
      const double lo = space.box_lo.empty() ? -1.0 : space.box_lo[i];
      const double hi = space.box_hi.empty() ? 1.0 : space.box_hi[i];
      x[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    if (!space.domain || space.domain(x).margin >= min_margin) return x;
  }
  throw InvalidArgument("could not sample a point in domain (" + space.domain_description + ")");
}

PoissonBivector PoissonBivector::canonical(int pairs) {
  PoissonBivector b;
  b.description = "canonical";
  b.at = [pairs](std::span<const double>) {
    Matrix<double> m(2 * pairs, 2 * pairs);
    for (int i = 0; i < pairs; ++i) {
      m(i, pairs + i) = 1.0;
      m(pairs + i, i) = -1.0;
    }
    return m;
  };
  return b;
}

PoissonBivector block_diagonal(const PoissonBivector& base, int n, int m) {
  if (m == 1) return base;
  PoissonBivector b;
  b.description = base.description + " (copy-wise sum over " + std::to_string(m) + " copies)";
  b.at = [at = base.at, n, m](std::span<const double> x) {
    Matrix<double> out(n * m, n * m);
    for (int a = 0; a < m; ++a) {
      const Matrix<double> blk = at(x.subspan(a * n, n));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) out(a * n + i, a * n + j) = blk(i, j);
      }
    }
    return out;
  };
  return b;
}

PoissonManifold power(const PoissonManifold& manifold, int m) {
  return {power(manifold.space, m), block_diagonal(manifold.bivector, manifold.space.n, m)};
}

std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> x) {
  static const double kStep = std::cbrt(std::numeric_limits<double>::epsilon());
  std::vector<double> g(x.size());
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = kStep * std::max(1.0, std::abs(x[i]));
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

std::vector<double> SmoothFunction::grad(std::span<const double> x) const {
  return gradient ? gradient(x) : fd_gradient(value, x);
}

double bracket_num(const PoissonManifold& manifold, const SmoothFunction& f,
                   const SmoothFunction& g, std::span<const double> x) {
  manifold.space.require_in_domain(x);
  const Matrix<double> lam = manifold.bivector.at(x);
  const std::vector<double> df = f.grad(x);
  const std::vector<double> dg = g.grad(x);
  double s = 0.0;
  for (int i = 0; i < lam.rows(); ++i) {
    if (df[i] == 0.0) continue;
    for (int j = 0; j < lam.cols(); ++j) s += lam(i, j) * df[i] * dg[j];
  }
  return s;
}

std::vector<double> hamiltonian_vf(const PoissonManifold& manifold, const SmoothFunction& f,
                                   std::span<const double> x) {
  manifold.space.require_in_domain(x);
  const Matrix<double> lam = manifold.bivector.at(x);
  const std::vector<double> df = f.grad(x);
  std::vector<double> v(lam.rows(), 0.0);
  for (int i = 0; i < lam.rows(); ++i) {
    for (int j = 0; j < lam.cols(); ++j) v[i] += lam(i, j) * df[j];
  }
  return v;
}

namespace {

void require_shape(const SymPoly& p, const Realization& R, std::size_t npts) {
  if (p.r() != R.r()) {
    throw ShapeError("polynomial has " + std::to_string(p.r()) + " generators, realization has " +
                     std::to_string(R.r()));
  }
  if (npts != static_cast<std::size_t>(p.m() * R.n())) {
    throw ShapeError("expected " + std::to_string(p.m()) + " points of dimension " +
                     std::to_string(R.n()));
  }
}

std::vector<double> generator_values(const Realization& R, int m, std::span<const double> pts) {
  const int n = R.n();
  const int r = R.r();
  std::vector<double> vals(static_cast<std::size_t>(m) * r);
  for (int a = 0; a < m; ++a) {
    const auto xa = pts.subspan(a * n, n);
    R.manifold.space.require_in_domain(xa);
    for (int al = 0; al < r; ++al) vals[a * r + al] = R.hams[al](xa);
  }
  return vals;
}

}  // namespace

double realize_eval(const SymPoly& p, const Realization& realization, std::span<const double> pts) {
  require_shape(p, realization, pts.size());
  return p.evaluate(generator_values(realization, p.m(), pts));
}

SmoothFunction realize(const SymPoly& p, const Realization& realization) {
  struct Shared {
    SymPoly poly;
    std::vector<SymPoly> partials;  // index a*r + alpha
    Realization R;
  };
  auto sh = std::make_shared<Shared>(Shared{p, {}, realization});
  for (int a = 0; a < p.m(); ++a) {
    for (int al = 0; al < p.r(); ++al) sh->partials.push_back(p.derivative(al, a));
  }
  SmoothFunction f;
  f.value = [sh](std::span<const double> x) { return realize_eval(sh->poly, sh->R, x); };
  f.gradient = [sh](std::span<const double> x) {
    const int m = sh->poly.m();
    const int r = sh->poly.r();
    const int n = sh->R.n();
    require_shape(sh->poly, sh->R, x.size());
    const std::vector<double> vals = generator_values(sh->R, m, x);
    std::vector<double> g(x.size(), 0.0);
    for (int a = 0; a < m; ++a) {
      const auto xa = x.subspan(a * n, n);
      for (int al = 0; al < r; ++al) {
        const SymPoly& d = sh->partials[a * r + al];
        if (d.is_zero()) continue;
        const double w = d.evaluate(vals);
        if (w == 0.0) continue;
        const std::vector<double> gh = sh->R.hams[al].grad(xa);
        for (int i = 0; i < n; ++i) g[a * n + i] += w * gh[i];
      }
    }
    return g;
  };
  return f;
}

namespace {

SymPoly random_poly(int r, Rng& rng) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_int_distribution<int> deg(0, 2);
  std::uniform_int_distribution<int> gen(0, r - 1);
  SymPoly p(r, 1);
  for (int t = 0; t < 4; ++t) {
    Exponents e(r, 0);
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) ++e[gen(rng)];
    p.add_term(e, coeff(rng));
  }
  return p;
}

}  // namespace

HomomorphismReport check_homomorphism(const Realization& R, int samples, double tol, Rng& rng) {
  if (samples < 1) throw InvalidArgument("samples must be >= 1");
  HomomorphismReport rep;
  rep.samples = samples;
  rep.tol = tol;
  const int r = R.r();
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_point(R.manifold.space, rng);
    std::vector<double> h(r);
    for (int g = 0; g < r; ++g) h[g] = R.hams[g](x);
    for (int a = 0; a < r; ++a) {
      for (int b = a + 1; b < r; ++b) {
        double rhs = 0.0;
        for (int g = 0; g < r; ++g) rhs += R.sc(a, b, g).get_d() * h[g];
        const double res = std::abs(bracket_num(R.manifold, R.hams[a], R.hams[b], x) - rhs);
        rep.max_residual = std::max(rep.max_residual, res);
        if (!(res <= tol)) {
          rep.pass = false;
          if (rep.failures.size() < 32) rep.failures.push_back({a + 1, b + 1, x, res});
        }
      }
    }
    const SymPoly P = random_poly(r, rng);
    const SymPoly Q = random_poly(r, rng);
    const double lhs = bracket_num(R.manifold, realize(P, R), realize(Q, R), x);
    const double rhs = realize_eval(poisson_bracket(P, Q, R.sc), R, x);
    const double rel = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
    rep.max_morphism_residual = std::max(rep.max_morphism_residual, rel);
    if (!(rel <= tol)) rep.pass = false;
  }
  return rep;
}

double bracket_at_t(const PoissonManifold& manifold, const TimeFunction& f, const TimeFunction& g,
                    double t, std::span<const double> x) {
  auto slice = [t](const TimeFunction& tf) {
    SmoothFunction s;
    s.value = [t, v = tf.value](std::span<const double> y) { return v(t, y); };
    if (tf.gradient) {
      s.gradient = [t, gr = tf.gradient](std::span<const double> y) { return gr(t, y); };
    }
    return s;
  };
  return bracket_num(manifold, slice(f), slice(g), x);
}

}  // namespace lhk
