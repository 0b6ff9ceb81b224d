// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace liouville {

// Iterative method failed to reach its target within the iteration budget.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A root/shooting bracket could not be established.
struct BracketingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A discrete linear-algebra problem was singular, indefinite or otherwise
// not solvable at the requested size.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_domain(bool cond, const char* msg) {
  if (!cond) throw std::domain_error(msg);
}

}  // namespace detail
}  // namespace liouville
