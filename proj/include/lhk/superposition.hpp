#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lhk/dynamics.hpp"
#include "lhk/systems.hpp"

namespace lhk {

struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

/// Named constants of a superposition rule together with the system
/// parameter they depend on (b0 for Kummer-Schwarz, b for Milne-Pinney).
struct SuperpositionConstants {
  std::string rule;
  std::vector<std::string> names;
  std::vector<double> values;
  double parameter = 0.0;
  double spread = 0.0;  // largest relative disagreement across sample times

  double operator[](std::size_t i) const { return values.at(i); }
};

// x = [x1 (x3 - x2) + k x3 (x1 - x2)] / [(x3 - x2) + k (x1 - x2)].
// Throws DegenerateInputError for coincident inputs or a vanishing
// denominator.
double riccati_rule(double x1, double x2, double x3, double k);

// Cross ratio (x1 - x)(x2 - x3) / ((x1 - x2)(x3 - x)), the constant k for
// which riccati_rule(x1, x2, x3, k) == x.
double riccati_constant(double x1, double x2, double x3, double x);

// Closed-form invariants on pairs of copies.
double kummer_schwarz_f2(double x1, double p1, double x2, double p2, double b0);
double milne_pinney_f2(double x1, double p1, double x2, double p2, double b);
double trig_su2_f2(double x1, double p1, double x2, double p2);

/// Signs chosen for each +- of a closed-form rule: Kummer-Schwarz uses
/// (x1 sign, p1 sign); Milne-Pinney uses (overall x1 sign, inner root sign,
/// p1 sign).
using Branch = std::vector<int>;

std::vector<Branch> branches(const std::string& rule);

// Target (x1, p1) from particular solutions (x2, p2), (x3, p3) with
// k1 = F^(2)(1,2) - 2 b0 and k2 = F^(2)(1,3) - 2 b0. For b0 == 0 the
// specialised closed form is used.
PhasePoint kummer_schwarz_rule(double x2, double p2, double x3, double p3, double k1, double k2,
                               double b0, const Branch& branch);

// Milne-Pinney (one-dimensional Smorodinsky-Winternitz) with
// k_i = 4 F^(2) - 2 b on copy pairs (1,2), (1,3), (2,3).
PhasePoint milne_pinney_rule(double x2, double p2, double x3, double p3, double k1, double k2,
                             double k3, double b, const Branch& branch);

struct TrigRoot {
  PhasePoint point;
  int label = 0;        // sign of det[n1, n2, n3] on the unit sphere
  double residual = 0.0;
};

// Every solution of F^(2)(1,2) = k1, F^(2)(1,3) = k2 found by Newton
// iteration from a coarse grid of seeds, deduplicated (p taken mod 2 pi).
// Throws NoConvergenceError when no seed converges below 1e-10.
std::vector<TrigRoot> trig_su2_roots(double x2, double p2, double x3, double p3, double k1,
                                     double k2);

// The root carrying `label` (+1 or -1), or the first root when label == 0.
PhasePoint trig_su2_rule(double x2, double p2, double x3, double p3, double k1, double k2,
                         int label);

/// Rules supported by extract_constants and verify_rule: "riccati",
/// "kummer-schwarz", "milne-pinney", "trig-su2".
int particular_count(const std::string& rule);

// Constants from a prolonged state, copy 1 = target, copies 2.. = particular
// solutions (all of the base state dimension).
SuperpositionConstants constants_at(const std::string& rule, const LieSystem& sys,
                                    std::span<const double> prolonged);

// Evaluates constants_at at each sample time of a prolonged trajectory and
// returns their mean. Throws DriftTooLargeError when the relative spread
// exceeds max_spread.
SuperpositionConstants extract_constants(const std::string& rule, const LieSystem& sys,
                                         const Trajectory& prolonged,
                                         std::span<const double> sample_times,
                                         double max_spread = 1e-6);

// All candidate reconstructions of copy 1 (labelled by branch index) from
// copies 2.. of a prolonged state and the constants. Candidates with a
// negative radicand or zero denominator are skipped.
struct Candidate {
  std::vector<double> state;
  int branch = 0;
};

std::vector<Candidate> reconstruct(const std::string& rule, const SuperpositionConstants& k,
                                   std::span<const double> particulars);

struct VerifyOptions {
  double t0 = 0.0;
  double t1 = 2.0;
  int grid = 201;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  Method method = Rkf45{};
  int max_attempts = 20;
  // Optional fixed initial data: target first, then particulars.
  std::vector<std::vector<double>> initial;
};

struct VerifyReport {
  std::string rule;
  std::string system;
  std::map<std::string, double> params;
  std::map<std::string, std::string> curves;
  int n_particular = 0;
  bool pass = false;
  double tol = 0.0;
  double max_error = 0.0;
  std::vector<double> times;
  std::vector<double> errors;
  std::vector<int> branch;
  std::vector<double> branch_switch_times;
  SuperpositionConstants constants;
  std::vector<std::vector<double>> initial;
  int attempts = 0;
  std::string errors_csv_path;  // recorded in the JSON when non-empty

  std::string to_json() const;
  std::string errors_csv() const;
};

// Integrates n_particular + 1 solutions of the prolonged system, extracts
// the constants, and reconstructs the target at each grid time by continuity
// branch selection. Errors from the rule carry the grid time in the message.
VerifyReport verify_rule(const LieSystem& sys, const std::string& rule, const VerifyOptions& opts);

}  // namespace lhk
