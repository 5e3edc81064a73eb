#pragma once

#include <stdexcept>
#include <string>

namespace icatopo {

/// Element geometry whose isoparametric Jacobian vanishes or flips sign.
class SingularGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// det F <= 0 at a quadrature point. Recoverable: the line search treats it
/// as a rejected trial step.
class NonpositiveJacobianError : public std::runtime_error {
 public:
  explicit NonpositiveJacobianError(const std::string& what, int element = -1)
      : std::runtime_error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

/// A pivot of the LDL^T factorization fell below the singularity threshold.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, int pivot)
      : std::runtime_error(what), pivot_(pivot) {}
  /// Row/column of the original (unpermuted) matrix.
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace icatopo
