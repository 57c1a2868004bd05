#include "lhk/lhk.h"

#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "lhk/algebra.hpp"
#include "lhk/dynamics.hpp"
#include "lhk/error.hpp"
#include "lhk/superposition.hpp"
#include "lhk/sympoly.hpp"
#include "lhk/systems.hpp"

using json = nlohmann::ordered_json;

struct lhk_algebra {
  lhk::StructureConstants sc;
};
struct lhk_poly {
  lhk::SymPoly p;
};
struct lhk_system {
  lhk::LieSystem sys;
};
struct lhk_trajectory {
  lhk::Trajectory traj;
};

namespace {

struct LastError {
  std::string message;
  std::string kind;
  std::string coordinate;
};

thread_local LastError g_error;

lhk_status status_for(const std::string& kind) {
  if (kind == "ParseError") return LHK_ERR_PARSE;
  if (kind == "CatalogError") return LHK_ERR_CATALOG;
  if (kind == "DomainError" || kind == "DomainExitError") return LHK_ERR_DOMAIN;
  if (kind == "InvalidArgument" || kind == "ShapeError" || kind == "SizeError") {
    return LHK_ERR_INVALID_ARGUMENT;
  }
  return LHK_ERR_NUMERIC;
}

lhk_status fail(lhk_status s, std::string kind, std::string message, std::string coord = {}) {
  g_error = {std::move(message), std::move(kind), std::move(coord)};
  return s;
}

// Runs f, translating exceptions into a status and the thread-local error.
// `names` resolves coordinate indices of domain errors.
template <typename F>
lhk_status guarded(F&& f, const std::vector<std::string>* names = nullptr) {
  g_error = {};
  auto coord_name = [&](int c) -> std::string {
    if (c < 0) return {};
    if (names && c < static_cast<int>(names->size())) return (*names)[c];
    return std::to_string(c + 1);
  };
  try {
    f();
    return LHK_OK;
  } catch (const lhk::DomainExitError& e) {
    return fail(LHK_ERR_DOMAIN, e.kind(), e.what(), coord_name(e.coordinate()));
  } catch (const lhk::DomainError& e) {
    return fail(LHK_ERR_DOMAIN, e.kind(), e.what(), coord_name(e.coordinate()));
  } catch (const lhk::Error& e) {
    return fail(status_for(e.kind()), e.kind(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(LHK_ERR_PARSE, "ParseError", e.what());
  } catch (const std::bad_alloc&) {
    return fail(LHK_ERR_INTERNAL, "OutOfMemory", "out of memory");
  } catch (const std::exception& e) {
    return fail(LHK_ERR_INTERNAL, "InternalError", e.what());
  } catch (...) {
    return fail(LHK_ERR_INTERNAL, "InternalError", "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

template <typename T>
void require_ptr(const T* p, const char* what) {
  if (!p) throw lhk::InvalidArgument(std::string("null ") + what);
}

lhk::Method to_method(const lhk_method& m) {
  if (m.kind == LHK_RK4) {
    if (!(m.h > 0.0)) throw lhk::InvalidArgument("rk4 step must be positive");
    return lhk::Rk4{m.h};
  }
  if (m.kind != LHK_RKF45) throw lhk::InvalidArgument("unknown integration method");
  if (!(m.atol > 0.0) || !(m.rtol > 0.0)) {
    throw lhk::InvalidArgument("rkf45 tolerances must be positive");
  }
  lhk::Rkf45 r;
  r.atol = m.atol;
  r.rtol = m.rtol;
  return r;
}

lhk::Method method_from_json(const json& j) {
  const std::string kind = j.value("kind", std::string("rkf45"));
  lhk_method m = lhk_method_default();
  if (kind == "rk4") {
    m.kind = LHK_RK4;
    m.h = j.value("h", 1e-3);
  } else if (kind == "rkf45") {
    m.atol = j.value("atol", m.atol);
    m.rtol = j.value("rtol", m.rtol);
  } else {
    throw lhk::InvalidArgument("unknown integration method '" + kind + "'");
  }
  return to_method(m);
}

json rational_json(const lhk::Rational& q) { return q.get_str(); }

json homomorphism_json(const lhk::HomomorphismReport& r, const std::string& name,
                       const std::string& bivector) {
  json j;
  j["realization"] = name;
  j["bivector"] = bivector;
  j["pass"] = r.pass;
  j["samples"] = r.samples;
  j["tol"] = r.tol;
  j["max_residual"] = r.max_residual;
  j["max_morphism_residual"] = r.max_morphism_residual;
  json f = json::array();
  for (const auto& e : r.failures) {
    f.push_back({{"alpha", e.alpha}, {"beta", e.beta}, {"point", e.point}, {"residual", e.residual}});
  }
  j["failures"] = f;
  return j;
}

std::vector<double> to_vector(const double* x, std::size_t n) {
  return n == 0 ? std::vector<double>{} : std::vector<double>(x, x + n);
}

}  // namespace

extern "C" {

const char* lhk_version(void) { return "0.1.0"; }
const char* lhk_last_error(void) { return g_error.message.c_str(); }
const char* lhk_last_error_kind(void) { return g_error.kind.c_str(); }
const char* lhk_last_error_coordinate(void) { return g_error.coordinate.c_str(); }
void lhk_string_free(char* s) { std::free(s); }

/* ---- algebra ---- */

lhk_status lhk_algebra_builtin(const char* name, lhk_algebra** out) {
  return guarded([&] {
    require_ptr(name, "name");
    require_ptr(out, "output");
    *out = new lhk_algebra{lhk::builtin(name).sc};
  });
}

lhk_status lhk_algebra_from_json(const char* text, lhk_algebra** out) {
  return guarded([&] {
    require_ptr(text, "text");
    require_ptr(out, "output");
    *out = new lhk_algebra{lhk::algebra_from_json(text)};
  });
}

lhk_status lhk_algebra_abelian(int dim, lhk_algebra** out) {
  return guarded([&] {
    require_ptr(out, "output");
    *out = new lhk_algebra{lhk::abelian(dim)};
  });
}

void lhk_algebra_free(lhk_algebra* a) { delete a; }
int lhk_algebra_dim(const lhk_algebra* a) { return a ? a->sc.dim() : 0; }

lhk_status lhk_algebra_list(char** out) {
  return guarded([&] {
    require_ptr(out, "output");
    json j = json::array();
    for (const auto& name : lhk::builtin_names()) {
      const auto e = lhk::builtin(name);
      j.push_back({{"name", e.name}, {"dim", e.sc.dim()}, {"basis", e.basis_labels}, {"notes", e.notes}});
    }
    *out = dup_string(j.dump(2));
  });
}

lhk_status lhk_algebra_to_json(const lhk_algebra* a, char** out) {
  return guarded([&] {
    require_ptr(a, "algebra");
    require_ptr(out, "output");
    *out = dup_string(lhk::algebra_to_json(a->sc));
  });
}

lhk_status lhk_algebra_validate(const lhk_algebra* a, char** out) {
  return guarded([&] {
    require_ptr(a, "algebra");
    require_ptr(out, "output");
    const auto v = lhk::validate(a->sc);
    json list = json::array();
    for (const auto& x : v) {
      list.push_back({{"kind", x.kind == lhk::Violation::Kind::Antisymmetry ? "antisymmetry" : "jacobi"},
                      {"indices", x.indices},
                      {"residual", rational_json(x.residual)},
                      {"message", x.describe()}});
    }
    json j;
    j["r"] = a->sc.dim();
    j["valid"] = v.empty();
    j["violations"] = list;
    *out = dup_string(j.dump(2));
  });
}

lhk_status lhk_algebra_adjoint_matrix(const lhk_algebra* a, const double* b, size_t r, double* out) {
  return guarded([&] {
    require_ptr(a, "algebra");
    require_ptr(b, "coefficients");
    require_ptr(out, "output");
    if (static_cast<int>(r) != a->sc.dim()) throw lhk::ShapeError("coefficient vector has wrong length");
    const auto m = lhk::adjoint_matrix<double>(a->sc, std::span<const double>(b, r));
    std::copy(m.data().begin(), m.data().end(), out);
  });
}

lhk_status lhk_algebra_center(const lhk_algebra* a, char** out) {
  return guarded([&] {
    require_ptr(a, "algebra");
    require_ptr(out, "output");
    json basis = json::array();
    for (const auto& w : lhk::center_basis(a->sc)) {
      json row = json::array();
      for (const auto& q : w) row.push_back(rational_json(q));
      basis.push_back(row);
    }
    json j;
    j["dimension"] = basis.size();
    j["basis"] = basis;
    *out = dup_string(j.dump(2));
  });
}

/* ---- polynomials ---- */

lhk_status lhk_poly_parse(const lhk_algebra* a, const char* text, int m, lhk_poly** out) {
  return guarded([&] {
    require_ptr(a, "algebra");
    require_ptr(text, "text");
    require_ptr(out, "output");
    *out = new lhk_poly{lhk::parse_sympoly(text, a->sc.dim(), m)};
  });
}

void lhk_poly_free(lhk_poly* p) { delete p; }
int lhk_poly_copies(const lhk_poly* p) { return p ? p->p.m() : 0; }
int lhk_poly_is_zero(const lhk_poly* p) { return p && p->p.is_zero() ? 1 : 0; }
int lhk_poly_equal(const lhk_poly* p, const lhk_poly* q) {
  return p && q && p->p == q->p ? 1 : 0;
}

lhk_status lhk_poly_to_string(const lhk_poly* p, char** out) {
  return guarded([&] {
    require_ptr(p, "polynomial");
    require_ptr(out, "output");
    *out = dup_string(lhk::to_string(p->p));
  });
}

lhk_status lhk_poly_add(const lhk_poly* p, const lhk_poly* q, lhk_poly** out) {
  return guarded([&] {
    require_ptr(p, "polynomial");
    require_ptr(q, "polynomial");
    require_ptr(out, "output");
    *out = new lhk_poly{lhk::add(p->p, q->p)};
  });
}

lhk_status lhk_poly_mul(const lhk_poly* p, const lhk_poly* q, lhk_poly** out) {
  return guarded([&] {
    require_ptr(p, "polynomial");
    require_ptr(q, "polynomial");
    require_ptr(out, "output");
    *out = new lhk_poly{lhk::mul(p->p, q->p)};
  });
}

lhk_status lhk_poly_scale(const lhk_poly* p, const char* factor, lhk_poly** out) {
  return guarded([&] {
    require_ptr(p, "polynomial");
    require_ptr(factor, "factor");
    require_ptr(out, "output");
    *out = new lhk_poly{lhk::scale(p->p, lhk::parse_rational(factor))};
  });
}

lhk_status lhk_poly_bracket(const lhk_algebra* a, const lhk_poly* p, const lhk_poly* q,
                            lhk_poly** out) {
  return guarded([&] {
    require_ptr(a, "algebra");
    require_ptr(p, "polynomial");
    require_ptr(q, "polynomial");
    require_ptr(out, "output");
    *out = new lhk_poly{lhk::poisson_bracket(p->p, q->p, a->sc)};
  });
}

lhk_status lhk_poly_coproduct(const lhk_poly* p, int m, lhk_poly** out) {
  return guarded([&] {
    require_ptr(p, "polynomial");
    require_ptr(out, "output");
    *out = new lhk_poly{lhk::coproduct(p->p, m)};
  });
}

lhk_status lhk_poly_embed(const lhk_poly* p, int m, lhk_poly** out) {
  return guarded([&] {
    require_ptr(p, "polynomial");
    require_ptr(out, "output");
    *out = new lhk_poly{lhk::embed(p->p, m)};
  });
}

lhk_status lhk_poly_permute(const lhk_poly* p, const int* sigma, size_t m, lhk_poly** out) {
  return guarded([&] {
    require_ptr(p, "polynomial");
    require_ptr(sigma, "permutation");
    require_ptr(out, "output");
    std::vector<int> s(sigma, sigma + m);
    for (int& v : s) --v;
    *out = new lhk_poly{lhk::permute_copies(p->p, s)};
  });
}

lhk_status lhk_casimir_check(const lhk_algebra* a, const lhk_poly* p, int* result) {
  return guarded([&] {
    require_ptr(a, "algebra");
    require_ptr(p, "polynomial");
    require_ptr(result, "output");
    *result = lhk::is_casimir(p->p, a->sc) ? 1 : 0;
  });
}

lhk_status lhk_casimir_find(const lhk_algebra* a, int dmax, char** out) {
  return guarded([&] {
    require_ptr(a, "algebra");
    require_ptr(out, "output");
    const auto basis = lhk::find_casimirs(a->sc, dmax);
    json list = json::array({"1"});
    for (const auto& p : basis.invariants) list.push_back(lhk::to_string(p));
    json j;
    j["dmax"] = dmax;
    j["dimension"] = basis.dimension();
    j["basis"] = list;
    *out = dup_string(j.dump(2));
  });
}

/* ---- systems ---- */

lhk_status lhk_system_list(char** out) {
  return guarded([&] {
    require_ptr(out, "output");
    *out = dup_string(json(lhk::system_names()).dump(2));
  });
}

lhk_status lhk_system_catalog(const char* name, const char* params_json, lhk_system** out) {
  return guarded([&] {
    require_ptr(name, "name");
    require_ptr(out, "output");
    json d;
    d["name"] = name;
    d["params"] = params_json ? json::parse(params_json) : json::object();
    *out = new lhk_system{lhk::system_from_json(d.dump())};
  });
}

lhk_status lhk_system_from_json(const char* descriptor, lhk_system** out) {
  return guarded([&] {
    require_ptr(descriptor, "descriptor");
    require_ptr(out, "output");
    *out = new lhk_system{lhk::system_from_json(descriptor)};
  });
}

void lhk_system_free(lhk_system* s) { delete s; }
int lhk_system_dim(const lhk_system* s) { return s ? s->sys.n() : 0; }
const char* lhk_system_rule(const lhk_system* s) { return s ? s->sys.rule.c_str() : ""; }

lhk_status lhk_system_describe(const lhk_system* s, char** out) {
  return guarded([&] {
    require_ptr(s, "system");
    require_ptr(out, "output");
    *out = dup_string(lhk::describe_json(s->sys));
  });
}

lhk_status lhk_system_vector_field(const lhk_system* s, double t, const double* x, size_t n,
                                   double* out) {
  const std::vector<std::string>* names = s ? &s->sys.space.names : nullptr;
  return guarded(
      [&] {
        require_ptr(s, "system");
        require_ptr(x, "point");
        require_ptr(out, "output");
        if (static_cast<int>(n) != s->sys.n()) throw lhk::ShapeError("point has wrong dimension");
        const auto v = lhk::vector_field(s->sys, t, std::span<const double>(x, n));
        std::copy(v.begin(), v.end(), out);
      },
      names);
}

lhk_status lhk_system_sample(const lhk_system* s, int m, uint64_t seed, double* out, size_t len) {
  return guarded([&] {
    require_ptr(s, "system");
    require_ptr(out, "output");
    if (m < 1) throw lhk::InvalidArgument("copy count must be at least 1");
    if (len != static_cast<std::size_t>(s->sys.n()) * m) throw lhk::ShapeError("output has wrong length");
    lhk::Rng rng(seed);
    for (int a = 0; a < m; ++a) {
      const auto p = lhk::sample_point(s->sys.space, rng, s->sys.sample_margin);
      std::copy(p.begin(), p.end(), out + static_cast<std::size_t>(a) * p.size());
    }
  });
}

lhk_status lhk_system_homomorphism(const lhk_system* s, int samples, double tol, uint64_t seed,
                                   char** out) {
  return guarded([&] {
    require_ptr(s, "system");
    require_ptr(out, "output");
    if (samples < 1) throw lhk::InvalidArgument("samples must be positive");
    if (!(tol > 0.0)) throw lhk::InvalidArgument("tolerance must be positive");
    const auto& sys = s->sys;
    if (!sys.realization) {
      throw lhk::InvalidArgument(sys.name + " has no Lie-Hamiltonian realization");
    }
    lhk::Rng rng(seed);
    json reps = json::array();
    bool pass = true;
    double worst = 0.0;
    auto run = [&](const lhk::Realization& r) {
      const auto rep = lhk::check_homomorphism(r, samples, tol, rng);
      pass = pass && rep.pass;
      worst = std::max(worst, rep.max_residual);
      reps.push_back(homomorphism_json(rep, r.name, r.manifold.bivector.description));
    };
    run(*sys.realization);
    for (const auto& alt : sys.alternate_realizations) run(alt);
    json j;
    j["system"] = sys.name;
    j["samples"] = samples;
    j["tol"] = tol;
    j["seed"] = seed;
    j["pass"] = pass;
    j["max_residual"] = worst;
    j["realizations"] = reps;
    *out = dup_string(j.dump(2));
  });
}

/* ---- dynamics ---- */

lhk_method lhk_method_default(void) {
  lhk_method m;
  m.kind = LHK_RKF45;
  m.h = 1e-3;
  m.atol = 1e-10;
  m.rtol = 1e-10;
  return m;
}

lhk_status lhk_integrate(const lhk_system* s, int m, const double* x0, size_t len, double t0,
                         double t1, lhk_method method, lhk_trajectory** out) {
  std::vector<std::string> names;
  return guarded(
      [&] {
        require_ptr(s, "system");
        require_ptr(x0, "initial state");
        require_ptr(out, "output");
        if (m < 1) throw lhk::InvalidArgument("copy count must be at least 1");
        if (!(t1 > t0)) throw lhk::InvalidArgument("integration needs t1 > t0");
        const auto ps = lhk::prolong(s->sys, m);
        names = ps.space.names;
        if (len != static_cast<std::size_t>(ps.dim())) {
          throw lhk::ShapeError("initial state has " + std::to_string(len) + " values, expected " +
                                std::to_string(ps.dim()));
        }
        const lhk::OdeSystem ode = m == 1 ? lhk::as_ode(s->sys) : lhk::as_ode(ps);
        auto traj = lhk::integrate(ode, std::span<const double>(x0, len), t0, t1, to_method(method));
        *out = new lhk_trajectory{std::move(traj)};
      },
      &names);
}

void lhk_trajectory_free(lhk_trajectory* t) { delete t; }
size_t lhk_trajectory_size(const lhk_trajectory* t) { return t ? t->traj.size() : 0; }
size_t lhk_trajectory_dim(const lhk_trajectory* t) { return t ? t->traj.names.size() : 0; }

lhk_status lhk_trajectory_time(const lhk_trajectory* t, size_t i, double* out) {
  return guarded([&] {
    require_ptr(t, "trajectory");
    require_ptr(out, "output");
    if (i >= t->traj.size()) throw lhk::InvalidArgument("sample index out of range");
    *out = t->traj.times[i];
  });
}

lhk_status lhk_trajectory_state(const lhk_trajectory* t, size_t i, double* out, size_t len) {
  return guarded([&] {
    require_ptr(t, "trajectory");
    require_ptr(out, "output");
    if (i >= t->traj.size()) throw lhk::InvalidArgument("sample index out of range");
    const auto& s = t->traj.states[i];
    if (len < s.size()) throw lhk::ShapeError("output buffer too small");
    std::copy(s.begin(), s.end(), out);
  });
}

lhk_status lhk_trajectory_csv(const lhk_trajectory* t, char** out) {
  return guarded([&] {
    require_ptr(t, "trajectory");
    require_ptr(out, "output");
    std::ostringstream os;
    lhk::write_csv(t->traj, os);
    *out = dup_string(os.str());
  });
}

lhk_status lhk_verify_constants(const lhk_system* s, int m, const double* x0, size_t len,
                                double t0, double t1, lhk_method method, double tol,
                                uint64_t seed, char** out) {
  std::vector<std::string> names;
  return guarded(
      [&] {
        require_ptr(s, "system");
        require_ptr(out, "output");
        if (m < 1) throw lhk::InvalidArgument("copy count must be at least 1");
        if (!(t1 > t0)) throw lhk::InvalidArgument("integration needs t1 > t0");
        if (!(tol > 0.0)) throw lhk::InvalidArgument("tolerance must be positive");
        const auto& sys = s->sys;
        const auto ps = lhk::prolong(sys, m);
        names = ps.space.names;
        std::vector<double> init;
        if (x0) {
          init = to_vector(x0, len);
          if (init.size() != static_cast<std::size_t>(ps.dim())) {
            throw lhk::ShapeError("initial state has wrong dimension");
          }
        } else {
          lhk::Rng rng(seed);
          for (int a = 0; a < m; ++a) {
            const auto p = lhk::sample_point(sys.space, rng, sys.sample_margin);
            init.insert(init.end(), p.begin(), p.end());
          }
        }
        const auto invs = lhk::casimir_invariants(sys, m);
        std::vector<lhk::NamedInvariant> all = invs;
        if (sys.name == "ermakov" && m == 1) {
          all.push_back(lhk::lewis_riesenfeld(sys.params.at("b")));
        }
        const auto traj = lhk::integrate(lhk::as_ode(ps), init, t0, t1, to_method(method));
        const auto drift = lhk::monitor_invariants(traj, all);
        json j;
        j["system"] = sys.name;
        j["params"] = sys.params;
        j["curves"] = sys.curves;
        j["m"] = m;
        j["t0"] = t0;
        j["t1"] = t1;
        j["integrator"] = traj.integrator;
        j["seed"] = seed;
        j["initial"] = init;
        j["steps"] = traj.size() - 1;
        j["tol"] = tol;
        j["max_drift"] = drift.max_drift();
        j["pass"] = drift.max_drift() < tol;
        j["drift"] = json::parse(drift.to_json());
        *out = dup_string(j.dump(2));
      },
      &names);
}

lhk_status lhk_lie_integral(const lhk_system* s, const double* f0, size_t r, const double* x0,
                            size_t n, double t0, double t1, lhk_method method, double tol,
                            uint64_t seed, char** out) {
  const std::vector<std::string>* names = s ? &s->sys.space.names : nullptr;
  return guarded(
      [&] {
        require_ptr(s, "system");
        require_ptr(out, "output");
        if (!(t1 > t0)) throw lhk::InvalidArgument("integration needs t1 > t0");
        if (!(tol > 0.0)) throw lhk::InvalidArgument("tolerance must be positive");
        const auto& sys = s->sys;
        if (!sys.realization) {
          throw lhk::InvalidArgument(sys.name + " has no Lie-Hamiltonian realization");
        }
        lhk::Rng rng(seed);
        std::vector<double> f;
        if (f0) {
          f = to_vector(f0, r);
          if (static_cast<int>(f.size()) != sys.r()) throw lhk::ShapeError("f0 has wrong length");
        } else {
          std::uniform_real_distribution<double> u(-1.0, 1.0);
          for (int a = 0; a < sys.r(); ++a) f.push_back(u(rng));
        }
        std::vector<double> x;
        if (x0) {
          x = to_vector(x0, n);
          if (static_cast<int>(x.size()) != sys.n()) throw lhk::ShapeError("x0 has wrong dimension");
        } else {
          x = lhk::sample_point(sys.space, rng, sys.sample_margin);
        }
        const lhk::Method meth = to_method(method);
        const auto traj = lhk::integrate(lhk::as_ode(sys), x, t0, t1, meth);
        const auto path = lhk::lie_integral_flow(sys.sc, sys.b, f, t0, t1, meth, traj.times);
        const auto rep = lhk::verify_lie_integral(sys, path, traj, tol);
        json j;
        j["system"] = sys.name;
        j["t0"] = t0;
        j["t1"] = t1;
        j["integrator"] = traj.integrator;
        j["seed"] = seed;
        j["f0"] = f;
        j["x0"] = x;
        j["f1"] = path.f.back();
        j["tol"] = tol;
        j["pass"] = rep.pass;
        j["initial"] = rep.initial;
        j["max_drift"] = rep.max_drift;
        j["samples"] = rep.samples;
        *out = dup_string(j.dump(2));
      },
      names);
}

/* ---- superposition ---- */

lhk_status lhk_verify_superposition(const lhk_system* s, const char* options_json, char** out,
                                    char** csv) {
  return guarded([&] {
    require_ptr(s, "system");
    require_ptr(out, "output");
    const auto& sys = s->sys;
    if (sys.rule.empty()) throw lhk::InvalidArgument(sys.name + " has no superposition rule");
    lhk::VerifyOptions o;
    std::string csv_path;
    if (options_json) {
      const json j = json::parse(options_json);
      for (const auto& [key, v] : j.items()) {
        if (key == "t0") {
          o.t0 = v.get<double>();
        } else if (key == "t1") {
          o.t1 = v.get<double>();
        } else if (key == "grid") {
          o.grid = v.get<int>();
        } else if (key == "seed") {
          o.seed = v.get<std::uint64_t>();
        } else if (key == "tol") {
          o.tol = v.get<double>();
        } else if (key == "max_attempts") {
          o.max_attempts = v.get<int>();
        } else if (key == "method") {
          o.method = method_from_json(v);
        } else if (key == "initial") {
          o.initial = v.get<std::vector<std::vector<double>>>();
        } else if (key == "errors_csv_path") {
          csv_path = v.get<std::string>();
        } else {
          throw lhk::InvalidArgument("unknown superposition option '" + key + "'");
        }
      }
    }
    auto rep = lhk::verify_rule(sys, sys.rule, o);
    rep.errors_csv_path = csv_path;
    std::string report = rep.to_json();
    std::string table = csv ? rep.errors_csv() : std::string();
    *out = dup_string(report);
    if (csv) *csv = dup_string(table);
  });
}

}  // extern "C"
