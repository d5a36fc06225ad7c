#pragma once

#include <stdexcept>
#include <string>

namespace popval {

// Argument outside the mathematical domain of an operation, or a type
// invariant violated at construction.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure failed to deliver its accuracy contract
// (non-convergence, loss of positive definiteness, divergent sampler).
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what, long iterations = -1)
      : std::runtime_error(what), iterations_(iterations) {}

  // Iteration count at failure, or -1 when not applicable.
  long iterations() const { return iterations_; }

 private:
  long iterations_;
};

}  // namespace popval
