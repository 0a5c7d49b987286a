#pragma once

#include <complex>
#include <map>

#include "noether/expr.hpp"

namespace noether {

// A number: an exact Gaussian rational or a complex long double (64-bit
// mantissa on x86-64).  Exact values degrade to floats on demand.
struct EvalValue {
    bool exact = true;
    CRat q;
    std::complex<long double> f;

    EvalValue() = default;
    explicit EvalValue(CRat v) : exact(true), q(std::move(v)) {}
    explicit EvalValue(std::complex<long double> v) : exact(false), f(v) {}
    explicit EvalValue(long double v) : exact(false), f(v) {}

    std::complex<long double> as_float() const {
        if (!exact) return f;
        return {rat_to_ld(q.re), rat_to_ld(q.im)};
    }
};

using EvalPoint = std::map<Atom, EvalValue>;

struct EvalResult {
    EvalValue value;
    // largest |term| met anywhere during the computation; the verifier
    // scales its tolerance by it to absorb cancellation
    long double max_term = 0;
};

// Evaluate with every atom of e bound in `point`.  The exact path runs when
// e is a rational function of its atoms and all bindings are exact.  Throws
// DivisionByZero / DomainError; callers resample.
EvalResult evaluate(const Expr& e, const EvalPoint& point);

}  // namespace noether
