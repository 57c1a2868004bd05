#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lhk/algebra.hpp"
#include "lhk/sympoly.hpp"

namespace lhk {

using Point = std::vector<double>;
using Rng = std::mt19937_64;

// Signed distance-like quantity to the domain boundary: the point is inside
// iff margin > 0. `coordinate` names the binding constraint (-1 if coupled).
struct DomainCheck {
  double margin;
  int coordinate;
};

struct PhaseSpace {
  int n = 0;
  std::vector<std::string> names;
  std::function<DomainCheck(std::span<const double>)> domain;
  std::string domain_description;
  // Sampling box; points are rejection-sampled inside it.
  std::vector<double> box_lo;
  std::vector<double> box_hi;

  bool in_domain(std::span<const double> x) const;
  // Throws DomainError naming the offending coordinate.
  void require_in_domain(std::span<const double> x) const;
};

// Copy-wise product N^m; coordinates are ordered copy-major and named
// "<name>_<copy>" with 1-based copies.
PhaseSpace power(const PhaseSpace& space, int m);

// Rejection sampling from the box keeping margin >= min_margin.
Point sample_point(const PhaseSpace& space, Rng& rng, double min_margin = 0.05);

struct PoissonBivector {
  std::function<Matrix<double>(std::span<const double>)> at;
  std::string description;

  // Lambda^{q_i p_i} = 1 on coordinates (q_1..q_k, p_1..p_k).
  static PoissonBivector canonical(int pairs);
};

// Block-diagonal Lambda on N^m from Lambda on N (state dimension n).
PoissonBivector block_diagonal(const PoissonBivector& base, int n, int m);

struct SmoothFunction {
  std::function<double(std::span<const double>)> value;
  // Empty means central finite differences.
  std::function<std::vector<double>(std::span<const double>)> gradient;

  double operator()(std::span<const double> x) const { return value(x); }
  std::vector<double> grad(std::span<const double> x) const;
  bool has_closed_gradient() const { return static_cast<bool>(gradient); }
};

// Central differences with step cbrt(eps) * max(1, |x_i|).
std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> x);

struct PoissonManifold {
  PhaseSpace space;
  PoissonBivector bivector;
};

PoissonManifold power(const PoissonManifold& manifold, int m);

/// Hamiltonian functions h_1..h_r on a Poisson manifold spanning a Lie
/// algebra with structure constants `sc` under the Poisson bracket.
struct Realization {
  std::string name;
  PoissonManifold manifold;
  std::vector<SmoothFunction> hams;
  StructureConstants sc;

  int n() const { return manifold.space.n; }
  int r() const { return static_cast<int>(hams.size()); }
};

// sum_ij Lambda^{ij}(x) df_i dg_j.
double bracket_num(const PoissonManifold& manifold, const SmoothFunction& f,
                   const SmoothFunction& g, std::span<const double> x);

// X_f^i = sum_j Lambda^{ij} d_j f, so that X_f g = {g, f}.
std::vector<double> hamiltonian_vf(const PoissonManifold& manifold, const SmoothFunction& f,
                                   std::span<const double> x);

// D^(m): v_alpha^(a) -> h_alpha(x_(a)). Points are concatenated copy-major.
double realize_eval(const SymPoly& p, const Realization& realization, std::span<const double> pts);

// D^(m)(P) as a function on N^m with chain-rule gradient.
SmoothFunction realize(const SymPoly& p, const Realization& realization);

struct HomomorphismFailure {
  int alpha = 0;  // 1-based
  int beta = 0;
  Point point;
  double residual = 0.0;
};

struct HomomorphismReport {
  bool pass = true;
  int samples = 0;
  double tol = 0.0;
  double max_residual = 0.0;
  double max_morphism_residual = 0.0;  // relative, on random polynomial pairs
  std::vector<HomomorphismFailure> failures;
};

// Samples points and checks |{h_a,h_b} - sum_g c_abg h_g| <= tol and, on
// random degree <= 2 polynomial pairs, |{D P, D Q} - D {P,Q}| <= tol scaled
// by max(1, |D {P,Q}|).
HomomorphismReport check_homomorphism(const Realization& realization, int samples, double tol,
                                      Rng& rng);

struct TimeFunction {
  std::function<double(double, std::span<const double>)> value;
  // Spatial gradient; empty means finite differences at frozen t.
  std::function<std::vector<double>(double, std::span<const double>)> gradient;
};

// Autonomisation bracket: freezes t and brackets the slices.
double bracket_at_t(const PoissonManifold& manifold, const TimeFunction& f, const TimeFunction& g,
                    double t, std::span<const double> x);

}  // namespace lhk
