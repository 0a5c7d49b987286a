#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "noether/eval.hpp"
#include "noether/expr.hpp"

namespace noether {

enum class ZeroStatus { ProvedZero, ProbablyZero, Nonzero, Inconclusive };

const char* to_string(ZeroStatus s);

struct ZeroTestOptions {
    int trials = 200;
    long double tol = 1e-9L;
    std::uint64_t seed = 0;
};

struct Verdict {
    ZeroStatus status = ZeroStatus::Inconclusive;
    int trials_used = 0;
    long double max_residual = 0;
    std::uint64_t seed = 0;
    std::optional<EvalPoint> counterexample;
    std::string counterexample_value;

    bool ok() const {
        return status == ZeroStatus::ProvedZero || status == ZeroStatus::ProbablyZero;
    }
};

// Identity certification.  Rational expressions are decided exactly through
// the canonical form; everything else is sampled at seeded random points,
// resampling on DivisionByZero / DomainError (at most 50 resamples per
// trial).  Nonzero verdicts carry a reproducible counterexample.
Verdict zero_test(const Expr& e, const ZeroTestOptions& opts = {});

}  // namespace noether
