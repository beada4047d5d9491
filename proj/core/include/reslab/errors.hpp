#pragma once

#include <stdexcept>
#include <string>

namespace reslab {

// Argument outside the domain of a kernel, formula or model (|x| = 0, branch point, d not in {1,2,3}, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// (A, B) pair violating AB* = BA* or the maximal-rank condition.
class AdmissibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Gamma matrix numerically singular: the requested energy is an eigenvalue.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver or quadrature failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root pattern of the decay quartic, or contour geometry, outside the supported regime.
class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace reslab
