#include "lhk/algebra.hpp"

#include <json.hpp>

#include <cctype>
#include <sstream>

#include "exact_linalg.hpp"
#include "lhk/error.hpp"

namespace lhk {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) throw ParseError("empty rational");
  s = s.substr(b, e - b + 1);
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  for (char ch : s) {
    if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '/')) {
      throw ParseError("invalid rational '" + std::string(text) + "'");
    }
  }
  Rational q;
  if (q.set_str(s, 10) != 0) throw ParseError("invalid rational '" + std::string(text) + "'");
  if (sgn(q.get_den()) == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  q.canonicalize();
  return q;
}

StructureConstants::StructureConstants(int dim) : dim_(dim) {
  if (dim < 1) throw InvalidArgument("algebra dimension must be >= 1");
  c_.resize(static_cast<std::size_t>(dim) * dim * dim);
}

StructureConstants& StructureConstants::set_raw(int a, int b, int g, const Rational& value) {
  if (a < 0 || b < 0 || g < 0 || a >= dim_ || b >= dim_ || g >= dim_) {
    throw ShapeError("structure-constant index out of range");
  }
  Rational& slot = c_[(a * dim_ + b) * dim_ + g];
  slot = value;
  slot.canonicalize();
  return *this;
}

StructureConstants& StructureConstants::set_bracket(int a, int b, int g, const Rational& value) {
  set_raw(a, b, g, value);
  set_raw(b, a, g, -value);
  return *this;
}

bool StructureConstants::is_abelian() const {
  for (const auto& v : c_) {
    if (sgn(v) != 0) return false;
  }
  return true;
}

std::string Violation::describe() const {
  std::ostringstream os;
  os << (kind == Kind::Antisymmetry ? "antisymmetry" : "jacobi") << " at (";
  for (std::size_t i = 0; i < indices.size(); ++i) os << (i ? "," : "") << indices[i];
  os << "), residual " << residual.get_str();
  return os.str();
}

std::vector<Violation> validate(const StructureConstants& sc) {
  const int r = sc.dim();
  std::vector<Violation> out;
  for (int a = 0; a < r; ++a) {
    for (int b = a; b < r; ++b) {
      for (int g = 0; g < r; ++g) {
        Rational s = sc(a, b, g) + sc(b, a, g);
        if (sgn(s) != 0) {
          out.push_back({Violation::Kind::Antisymmetry, {a + 1, b + 1, g + 1}, s});
        }
      }
    }
  }
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      for (int g = 0; g < r; ++g) {
        for (int nu = 0; nu < r; ++nu) {
          Rational s = 0;
          for (int mu = 0; mu < r; ++mu) {
            s += sc(a, b, mu) * sc(mu, g, nu) + sc(b, g, mu) * sc(mu, a, nu) +
                 sc(g, a, mu) * sc(mu, b, nu);
          }
          if (sgn(s) != 0) {
            out.push_back({Violation::Kind::Jacobi, {a + 1, b + 1, g + 1, nu + 1}, s});
          }
        }
      }
    }
  }
  return out;
}

StructureConstants abelian(int dim) { return StructureConstants(dim); }

namespace {

AlgebraCatalogEntry make_sl2() {
  StructureConstants sc(3);
  sc.set_bracket(0, 1, 0, -1);  // [v1,v2] = -v1
  sc.set_bracket(0, 2, 1, -2);  // [v1,v3] = -2 v2
  sc.set_bracket(1, 2, 2, -1);  // [v2,v3] = -v3
  return {"sl2", sc, {"v1", "v2", "v3"},
          "sl(2,R); realized by h1, h2, h3 of the Ermakov, Riccati, "
          "Kummer-Schwarz and Smorodinsky-Winternitz systems. "
          "Casimir v1*v3 - v2^2."};
}

AlgebraCatalogEntry make_su2() {
  StructureConstants sc(3);
  sc.set_bracket(0, 1, 2, -1);  // [v1,v2] = -v3
  sc.set_bracket(2, 0, 1, -1);  // [v3,v1] = -v2
  sc.set_bracket(1, 2, 0, -1);  // [v2,v3] = -v1
  return {"su2", sc, {"v1", "v2", "v3"},
          "su(2); realized by the trigonometric system on T*(-1,1). "
          "Casimir v1^2 + v2^2 + v3^2."};
}

// Read off from the canonical bracket {f,g} = f_x g_p - f_p g_x applied to
// h1 = -2 sqrt(-p), h2 = p, h3 = x p, h4 = x^2 p, h5 = -2 x sqrt(-p), h6 = 1
// on p < 0.
AlgebraCatalogEntry make_h6() {
  StructureConstants sc(6);
  sc.set_bracket(0, 2, 0, Rational(-1, 2));  // {h1,h3} = -h1/2
  sc.set_bracket(0, 3, 4, -1);               // {h1,h4} = -h5
  sc.set_bracket(0, 4, 5, 2);                // {h1,h5} = 2 h6
  sc.set_bracket(1, 2, 1, -1);               // {h2,h3} = -h2
  sc.set_bracket(1, 3, 2, -2);               // {h2,h4} = -2 h3
  sc.set_bracket(1, 4, 0, -1);               // {h2,h5} = -h1
  sc.set_bracket(2, 3, 3, -1);               // {h3,h4} = -h4
  sc.set_bracket(2, 4, 4, Rational(-1, 2));  // {h3,h5} = -h5/2
  return {"h6", sc, {"v1", "v2", "v3", "v4", "v5", "v6"},
          "Six-dimensional algebra sl(2,R) semidirect Heisenberg-Weyl of the "
          "second-order Riccati system; constants computed from the canonical "
          "bracket of its Hamiltonian functions, v6 = 1 central."};
}

}  // namespace

std::vector<std::string> builtin_names() { return {"sl2", "su2", "h6"}; }

AlgebraCatalogEntry builtin(std::string_view name) {
  if (name == "sl2") return make_sl2();
  if (name == "su2") return make_su2();
  if (name == "h6") return make_h6();
  throw CatalogError("unknown algebra '" + std::string(name) + "'");
}

template <typename T>
Matrix<T> adjoint_matrix(const StructureConstants& sc, std::span<const T> b) {
  const int r = sc.dim();
  if (static_cast<int>(b.size()) != r) {
    throw ShapeError("coefficient vector has length " + std::to_string(b.size()) +
                     ", algebra dimension is " + std::to_string(r));
  }
  Matrix<T> m(r, r);
  for (int a = 0; a < r; ++a) {
    for (int g = 0; g < r; ++g) {
      T s = 0;
      for (int be = 0; be < r; ++be) {
        const Rational& c = sc(g, be, a);
        if (sgn(c) == 0) continue;
        if constexpr (std::is_same_v<T, Rational>) {
          s -= b[be] * c;
        } else {
          s -= b[be] * c.get_d();
        }
      }
      m(a, g) = s;
    }
  }
  return m;
}

template Matrix<double> adjoint_matrix(const StructureConstants&, std::span<const double>);
template Matrix<Rational> adjoint_matrix(const StructureConstants&, std::span<const Rational>);

template <typename T>
Triangularity classify_triangular(const Matrix<T>& m) {
  bool strict = true;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = i; j < m.cols(); ++j) {
      if (m(i, j) == 0) continue;
      if (j > i) return Triangularity::None;
      strict = false;
    }
  }
  return strict ? Triangularity::StrictlyLower : Triangularity::Lower;
}

template Triangularity classify_triangular(const Matrix<double>&);
template Triangularity classify_triangular(const Matrix<Rational>&);

std::vector<std::vector<Rational>> center_basis(const StructureConstants& sc) {
  const int r = sc.dim();
  // Unknown w (length r); one equation per (b, g): sum_a w_a c(a, b, g) = 0.
  std::vector<detail::RationalRow> rows;
  for (int b = 0; b < r; ++b) {
    for (int g = 0; g < r; ++g) {
      detail::RationalRow row(r);
      bool any = false;
      for (int a = 0; a < r; ++a) {
        row[a] = sc(a, b, g);
        any = any || sgn(row[a]) != 0;
      }
      if (any) rows.push_back(std::move(row));
    }
  }
  return detail::kernel(std::move(rows), r);
}

StructureConstants algebra_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("algebra JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("r") || !j["r"].is_number_integer()) {
    throw ParseError("algebra JSON: missing integer field 'r'");
  }
  const int r = j["r"].get<int>();
  if (r < 1) throw ParseError("algebra JSON: r must be >= 1");
  StructureConstants sc(r);
  if (!j.contains("c")) return sc;
  if (!j["c"].is_array()) throw ParseError("algebra JSON: 'c' must be an array");
  for (const auto& entry : j["c"]) {
    if (!entry.is_array() || entry.size() != 4 || !entry[0].is_number_integer() ||
        !entry[1].is_number_integer() || !entry[2].is_number_integer()) {
      throw ParseError("algebra JSON: entries must be [alpha, beta, gamma, \"p/q\"]");
    }
    const int a = entry[0].get<int>();
    const int b = entry[1].get<int>();
    const int g = entry[2].get<int>();
    if (a < 1 || b < 1 || g < 1 || a > r || b > r || g > r) {
      throw ParseError("algebra JSON: index out of range 1.." + std::to_string(r));
    }
    if (a >= b) throw ParseError("algebra JSON: entries must have alpha < beta");
    Rational v = entry[3].is_string() ? parse_rational(entry[3].get<std::string>())
                 : entry[3].is_number_integer() ? Rational(entry[3].get<long>())
                 : throw ParseError("algebra JSON: coefficient must be a \"p/q\" string");
    sc.set_bracket(a - 1, b - 1, g - 1, sc(a - 1, b - 1, g - 1) + v);
  }
  return sc;
}

std::string algebra_to_json(const StructureConstants& sc) {
  nlohmann::json j;
  j["r"] = sc.dim();
  j["c"] = nlohmann::json::array();
  for (int a = 0; a < sc.dim(); ++a) {
    for (int b = a + 1; b < sc.dim(); ++b) {
      for (int g = 0; g < sc.dim(); ++g) {
        if (sgn(sc(a, b, g)) != 0) {
          j["c"].push_back({a + 1, b + 1, g + 1, sc(a, b, g).get_str()});
        }
      }
    }
  }
  return j.dump();
}

}  // namespace lhk
