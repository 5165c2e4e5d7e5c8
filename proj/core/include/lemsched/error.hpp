#pragma once

#include <stdexcept>
#include <string>

namespace lemsched {

// Bad input: wrong shape, broken invariant, out-of-range index.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Iterative routine failed to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Value outside the domain of a function (e.g. log of a non-positive eigenvalue).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Problem too large for an exact method.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

// File could not be read or written. The message carries the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lemsched
