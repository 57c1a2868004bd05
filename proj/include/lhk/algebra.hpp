#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lhk/rational.hpp"

namespace lhk {

// Dense row-major matrix; used for both exact and floating entries.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  T& operator()(int i, int j) { return data_[i * cols_ + j]; }
  const T& operator()(int i, int j) const { return data_[i * cols_ + j]; }
  std::span<const T> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

/// Structure constants of a finite-dimensional real Lie algebra in a fixed
/// basis v_1..v_r: [v_a, v_b] = sum_g c(a, b, g) v_g.
///
/// Storage and accessors are 0-based; documentation and file formats use
/// 1-based indices. Entries are exact rationals so that Lie-algebra and
/// Casimir identities can be checked for identical vanishing.
class StructureConstants {
 public:
  explicit StructureConstants(int dim);

  int dim() const { return dim_; }

  const Rational& operator()(int a, int b, int g) const {
    return c_[(a * dim_ + b) * dim_ + g];
  }

  // Sets c(a, b, g) = value and c(b, a, g) = -value.
  StructureConstants& set_bracket(int a, int b, int g, const Rational& value);

  // Sets one entry without antisymmetric completion.
  StructureConstants& set_raw(int a, int b, int g, const Rational& value);

  bool is_abelian() const;

  bool operator==(const StructureConstants&) const = default;

 private:
  int dim_;
  std::vector<Rational> c_;
};

struct Violation {
  enum class Kind { Antisymmetry, Jacobi };
  Kind kind;
  // 1-based: (a, b, g) for antisymmetry, (a, b, g, nu) for Jacobi.
  std::vector<int> indices;
  Rational residual;

  std::string describe() const;
};

// Empty iff antisymmetry and the Jacobi identity hold exactly.
std::vector<Violation> validate(const StructureConstants& sc);

struct AlgebraCatalogEntry {
  std::string name;
  StructureConstants sc;
  std::vector<std::string> basis_labels;
  std::string notes;
};

// Catalog names: "sl2", "su2", "h6". Throws CatalogError otherwise.
AlgebraCatalogEntry builtin(std::string_view name);
std::vector<std::string> builtin_names();

StructureConstants abelian(int dim);

/// Matrix of the Lie-integral flow df/dt = M(b) f, with
/// M(a, g) = -sum_b b_b c(g, b, a).
template <typename T>
Matrix<T> adjoint_matrix(const StructureConstants& sc, std::span<const T> b);

enum class Triangularity { StrictlyLower, Lower, None };

template <typename T>
Triangularity classify_triangular(const Matrix<T>& m);

// Exact basis of the centre {w : [w, v_a] = 0 for all a}.
std::vector<std::vector<Rational>> center_basis(const StructureConstants& sc);

// JSON algebra format: {"r": int, "c": [[a, b, g, "p/q"], ...]} with a < b
// (1-based), antisymmetric completion implied.
StructureConstants algebra_from_json(std::string_view text);
std::string algebra_to_json(const StructureConstants& sc);

}  // namespace lhk
