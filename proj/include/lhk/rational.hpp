#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace lhk {

using Rational = mpq_class;

// Parses "p", "-p", "p/q" (q != 0); result is canonicalized.
Rational parse_rational(std::string_view text);

inline std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace lhk
