#pragma once

#include <stdexcept>
#include <string>

namespace noether {

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by exact arithmetic and by evaluation when a denominator vanishes.
struct DivisionByZero : EngineError {
    DivisionByZero() : EngineError("division by zero") {}
    explicit DivisionByZero(const std::string& what) : EngineError(what) {}
};

// Raised by numeric evaluation outside a function's domain (ln of a
// non-positive real, overflow, ...).  Callers treat it as "resample".
struct DomainError : EngineError {
    explicit DomainError(const std::string& what) : EngineError(what) {}
};

struct NonlinearCharacteristic : EngineError {
    explicit NonlinearCharacteristic(const std::string& what) : EngineError(what) {}
};

struct NotVariational : EngineError {
    std::string variable;
    std::string residual;
    NotVariational(std::string var, std::string res)
        : EngineError("characteristic is not variational: Euler expression in " + var +
                      " does not vanish"),
          variable(std::move(var)),
          residual(std::move(res)) {}
};

struct ResidualNonzero : EngineError {
    explicit ResidualNonzero(const std::string& what) : EngineError(what) {}
};

struct ConstraintViolated : EngineError {
    explicit ConstraintViolated(const std::string& what) : EngineError(what) {}
};

struct ParseError : EngineError {
    int line = 0;
    int column = 0;
    ParseError(int ln, int col, const std::string& what)
        : EngineError("parse error at " + std::to_string(ln) + ":" + std::to_string(col) +
                      ": " + what),
          line(ln),
          column(col) {}
};

struct UndeclaredIdentifier : EngineError {
    explicit UndeclaredIdentifier(const std::string& name)
        : EngineError("undeclared identifier: " + name) {}
};

struct ConstraintNotLinear : EngineError {
    explicit ConstraintNotLinear(const std::string& what) : EngineError(what) {}
};

struct GoldenMismatch : EngineError {
    explicit GoldenMismatch(const std::string& what) : EngineError(what) {}
};

}  // namespace noether
