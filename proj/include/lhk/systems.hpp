#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lhk/curves.hpp"
#include "lhk/realization.hpp"
#include "lhk/sympoly.hpp"

namespace lhk {

using CoefficientFn = std::function<double(double)>;
using VectorFieldFn = std::function<std::vector<double>(std::span<const double>)>;

/// A t-dependent Lie system X_t = sum_alpha b_alpha(t) X_alpha. When a
/// realization is present, X_alpha is the Hamiltonian vector field of h_alpha
/// and the system is Lie-Hamilton; otherwise `fields` holds X_alpha directly.
struct LieSystem {
  std::string name;
  std::string notes;
  PhaseSpace space;
  StructureConstants sc{1};
  std::string algebra;  // catalog algebra name, empty if none
  std::optional<Realization> realization;
  std::vector<Realization> alternate_realizations;
  std::vector<VectorFieldFn> fields;  // only when realization is empty
  std::vector<std::string> generator_text;

  std::vector<CoefficientFn> b;
  std::vector<std::string> b_text;

  std::optional<SymPoly> casimir;  // abstract Casimir in S_g (m = 1)
  std::string rule;                // superposition rule id, empty if none
  double homomorphism_tol = 1e-8;
  double sample_margin = 0.05;
  std::map<std::string, double> params;
  std::map<std::string, std::string> curves;  // input curves, described

  int n() const { return space.n; }
  int r() const { return static_cast<int>(b.size()); }
  bool is_hamiltonian() const { return realization.has_value(); }
};

// sum_alpha b_alpha(t) X_alpha(x). Throws DomainError outside the domain or
// when a coefficient curve is evaluated outside its interval.
std::vector<double> vector_field(const LieSystem& sys, double t, std::span<const double> x);

// Unchecked variant for integrators; writes into `out` (size n).
void vector_field_into(const LieSystem& sys, double t, std::span<const double> x,
                       std::span<double> out);

/// Diagonal prolongation to m copies sharing the same coefficients.
struct ProlongedSystem {
  LieSystem base;
  int m = 1;
  PhaseSpace space;                       // base.space^m
  std::optional<PoissonManifold> manifold;  // block-diagonal bivector

  int dim() const { return space.n; }
};

ProlongedSystem prolong(const LieSystem& sys, int m);

std::vector<double> vector_field(const ProlongedSystem& sys, double t, std::span<const double> x);
void vector_field_into(const ProlongedSystem& sys, double t, std::span<const double> x,
                       std::span<double> out);

/// Catalog parameters. Scalars go in `values` (b0, b, n, ...), per-coordinate
/// constants in `lists` (e.g. b for smorodinsky-winternitz), and named
/// coefficient curves in `curves` (omega, b1, a0, a1, a2, Bx, By, Bz).
struct SystemParams {
  std::map<std::string, double> values;
  std::map<std::string, std::vector<double>> lists;
  std::map<std::string, CoefficientCurve> curves;
};

std::vector<std::string> system_names();

// Throws CatalogError for unknown names and InvalidArgument for bad
// parameters (unknown keys included).
LieSystem catalog(std::string_view name, const SystemParams& params = {});

// Descriptor: {"name": ..., "params": {...}, "coefficients": [...] | {...}}.
// Positional coefficients follow coefficient_names(name); each entry is a
// mini-language string or {"form": "constant"|"polynomial"|"sinusoid"|
// "tabulated", ...}.
LieSystem system_from_json(std::string_view descriptor);

// Curve names accepted by a catalog entry, in positional order.
std::vector<std::string> coefficient_names(std::string_view name);

// Metadata for display: coordinates, generators, coefficients, domain, etc.
std::string describe_json(const LieSystem& sys);

// The system with coefficient curves replaced (same r).
LieSystem with_coefficients(const LieSystem& sys, std::vector<CoefficientFn> b,
                            std::vector<std::string> text);

}  // namespace lhk
