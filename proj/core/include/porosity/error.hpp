#pragma once

#include <stdexcept>
#include <string>

namespace porosity {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed set, scaling-function or plan specification.
class ParseError : public Error {
public:
    using Error::Error;
};

// Precondition violation: h <= 0, empty set where a point is required, etc.
class DomainError : public Error {
public:
    using Error::Error;
};

// Enumeration cap hit. Callers that can degrade gracefully catch this and flag
// their result as partial.
class BudgetExhausted : public Error {
public:
    explicit BudgetExhausted(std::size_t cap)
        : Error("enumeration budget of " + std::to_string(cap) + " points exhausted"), cap_(cap) {}
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

// Exact and log-domain scalars were combined.
class ModeMismatch : public Error {
public:
    using Error::Error;
};

// Two independent estimates of the same quantity disagree beyond tolerance.
class Disagreement : public Error {
public:
    Disagreement(const std::string& what, double a, double b)
        : Error(what), first(a), second(b) {}
    double first;
    double second;
};

}  // namespace porosity
