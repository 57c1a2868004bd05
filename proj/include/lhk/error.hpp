#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lhk {

// Every failure raised by the library derives from Error and carries a stable
// type name. The C API and the CLI surface that name verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define LHK_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  }

LHK_DEFINE_ERROR(ShapeError);
LHK_DEFINE_ERROR(CatalogError);
LHK_DEFINE_ERROR(ParseError);
LHK_DEFINE_ERROR(SizeError);
LHK_DEFINE_ERROR(InvalidArgument);
LHK_DEFINE_ERROR(StepUnderflowError);
LHK_DEFINE_ERROR(DegenerateInputError);
LHK_DEFINE_ERROR(NegativeRadicandError);
LHK_DEFINE_ERROR(ZeroDenominatorError);
LHK_DEFINE_ERROR(SingularConstantsError);
LHK_DEFINE_ERROR(NoConvergenceError);
LHK_DEFINE_ERROR(DriftTooLargeError);
LHK_DEFINE_ERROR(GridMismatchError);

#undef LHK_DEFINE_ERROR

// A point left the open domain of a phase space. `coordinate` is the index of
// the offending coordinate (-1 when the constraint couples several).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, int coordinate = -1)
      : Error("DomainError", what), coordinate_(coordinate) {}
  int coordinate() const noexcept { return coordinate_; }

 private:
  int coordinate_;
};

// Integration stopped at the domain boundary; holds the last interior state.
class DomainExitError : public Error {
 public:
  DomainExitError(const std::string& what, double t, std::vector<double> state,
                  int coordinate)
      : Error("DomainExitError", what),
        t_(t),
        state_(std::move(state)),
        coordinate_(coordinate) {}

  double time() const noexcept { return t_; }
  const std::vector<double>& last_state() const noexcept { return state_; }
  int coordinate() const noexcept { return coordinate_; }

 private:
  double t_;
  std::vector<double> state_;
  int coordinate_;
};

}  // namespace lhk
