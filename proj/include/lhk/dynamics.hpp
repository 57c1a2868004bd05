#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lhk/realization.hpp"
#include "lhk/systems.hpp"

namespace lhk {

/// First-order system dx/dt = f(t, x) on an open domain.
struct OdeSystem {
  std::string name;
  PhaseSpace space;
  std::function<void(double, std::span<const double>, std::span<double>)> rhs;
  int m = 1;  // copy count for prolonged systems

  int dim() const { return space.n; }
};

OdeSystem as_ode(const LieSystem& sys);
OdeSystem as_ode(const ProlongedSystem& sys);

struct Rk4 {
  double h = 1e-3;
};

// Fehlberg 4(5) pair, propagating the fifth-order solution, with PI step
// control on the max-norm of the scaled error.
struct Rkf45 {
  double atol = 1e-10;
  double rtol = 1e-10;
  double h0 = 0.0;  // 0 picks an initial step automatically
  double hmax = 0.0;  // 0 means unbounded
  std::size_t max_steps = 5'000'000;
};

using Method = std::variant<Rk4, Rkf45>;

std::string describe(const Method& method);

struct Trajectory {
  std::vector<double> times;
  std::vector<Point> states;
  std::vector<std::string> names;
  std::string system;
  int m = 1;
  std::string integrator;

  std::size_t size() const { return times.size(); }
  // Exact sample when t is on the grid, linear interpolation otherwise.
  // Throws GridMismatchError outside [times.front(), times.back()].
  Point at(double t) const;
  // Copy a (0-based) of the state at sample i.
  std::vector<double> copy(std::size_t i, int a) const;
};

/// Integrates from (t0, x0) to t1, recording every accepted step. Steps are
/// shortened to land exactly on each time in `stops` inside (t0, t1).
/// Throws DomainError if x0 is outside the domain, DomainExitError (holding
/// the last interior state) when the solution leaves it, and
/// StepUnderflowError when the adaptive step collapses.
Trajectory integrate(const OdeSystem& sys, std::span<const double> x0, double t0, double t1,
                     const Method& method, std::span<const double> stops = {});

// CSV with header "t,<names>" and 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& os);

struct NamedInvariant {
  std::string name;
  SmoothFunction f;
};

struct DriftEntry {
  std::string name;
  double initial = 0.0;
  double max_drift = 0.0;  // relative to max(1, |initial|)
  std::size_t samples = 0;
};

struct DriftReport {
  std::vector<DriftEntry> entries;

  double max_drift() const;
  std::string to_json() const;
};

DriftReport monitor_invariants(const Trajectory& traj, const std::vector<NamedInvariant>& invs);

// D^(m)(P) for a polynomial over m copies, named.
NamedInvariant realized(std::string name, const SymPoly& p, const Realization& R);

// F^(k) = D^(m)(Delta^(k)(C)) embedded in m copies for k = 2..m, the m = 1
// Casimir value when m == 1, and F^(2)_{ij} = S_ij F^(2) for every copy
// transposition (i, j) that moves F^(2).
std::vector<NamedInvariant> casimir_invariants(const LieSystem& sys, int m);

// The Lewis-Riesenfeld invariant (vy x - vx y)^2 + b (1 + y^2/x^2) of the
// ermakov entry.
NamedInvariant lewis_riesenfeld(double b);

struct InvolutionReport {
  bool pass = true;
  int samples = 0;
  double tol = 0.0;
  double max_abs = 0.0;
};

// |{D P, D Q}_{Lambda^m}| at sampled points of N^m.
InvolutionReport involution_check(const SymPoly& p, const SymPoly& q, const Realization& R,
                                  int samples, double tol, Rng& rng, double min_margin = 0.05);

struct IndependenceReport {
  int rank = 0;
  double det = 0.0;
  double det_normalized = 0.0;  // determinant after scaling rows to unit norm
  std::vector<double> singular_values;
  std::vector<std::vector<double>> jacobian;
};

// Jacobian of fs with respect to the coordinates `wrt` (square). Rank counts
// singular values above 1e-8 times the largest.
IndependenceReport independence_check(const std::vector<SmoothFunction>& fs,
                                       std::span<const int> wrt, std::span<const double> pt,
                                       const PhaseSpace& space);

struct LieIntegralPath {
  std::vector<double> times;
  std::vector<std::vector<double>> f;

  // Linear interpolation; throws GridMismatchError outside the span.
  std::vector<double> at(double t) const;
};

// df/dt = M(b(t)) f with M from adjoint_matrix.
LieIntegralPath lie_integral_flow(const StructureConstants& sc, const std::vector<CoefficientFn>& b,
                                  std::span<const double> f0, double t0, double t1,
                                  const Method& method, std::span<const double> stops = {});

struct LieIntegralReport {
  bool pass = true;
  double tol = 0.0;
  double initial = 0.0;
  double max_drift = 0.0;  // relative to max(1, |initial|)
  std::size_t samples = 0;
};

// Checks that sum_alpha f_alpha(t) h_alpha(x(t)) stays constant along traj.
LieIntegralReport verify_lie_integral(const LieSystem& sys, const LieIntegralPath& path,
                                      const Trajectory& traj, double tol);

// Shortest round-trip decimal form used in every report.
std::string format_double(double v);

}  // namespace lhk
