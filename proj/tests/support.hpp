#pragma once

// Hand-rolled generators shared by the property tests.

#include <cstdint>
#include <random>

#include "lhk/sympoly.hpp"

namespace lhk::testing {

using Gen = std::mt19937_64;

inline Rational small_rational(Gen& g) {
  std::uniform_int_distribution<int> num(-5, 5);
  std::uniform_int_distribution<int> den(1, 3);
  Rational q(num(g), den(g));
  q.canonicalize();
  return q;
}

// Random polynomial over m copies of r generators with total degree <= dmax.
inline SymPoly random_poly(Gen& g, int r, int m, int dmax, int max_terms = 4) {
  std::uniform_int_distribution<int> nterms(1, max_terms);
  std::uniform_int_distribution<int> deg(0, dmax);
  std::uniform_int_distribution<int> slot(0, r * m - 1);
  SymPoly p(r, m);
  const int t = nterms(g);
  for (int i = 0; i < t; ++i) {
    Exponents e(static_cast<std::size_t>(r * m), 0);
    const int d = deg(g);
    for (int k = 0; k < d; ++k) ++e[slot(g)];
    Rational c = small_rational(g);
    if (c == 0) c = 1;
    p.add_term(e, c);
  }
  return p;
}

inline double uniform(Gen& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

}  // namespace lhk::testing
