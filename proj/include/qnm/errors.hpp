#pragma once

#include <stdexcept>
#include <string>

namespace qnm {

// Bad argument shapes or subsystem layouts.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (negative time, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// A numerical invariant failed: non-Hermitian input, negative eigenvalues,
// an incomplete Kraus set, an inconsistent entropic identity.
class InvariantError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qnm
