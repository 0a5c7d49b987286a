#pragma once

#include <map>
#include <string>
#include <vector>

#include "noether/errors.hpp"
#include "noether/expr.hpp"
#include "noether/operators.hpp"
#include "noether/verifier.hpp"

namespace noether {

// Continuous jet calculus.  Expressions must carry derivative-mode
// multi-indices; derivative orders are discovered lazily from the atoms
// actually present, there is no jet-space truncation.

Expr total_derivative(const Expr& e, std::size_t axis);
Expr total_derivative_multi(const Expr& e, const MultiIndex& J);

// E_alpha(L) = sum_J (-D)_J (dL/du^alpha_J)
Expr euler_operator(const Expr& L, const std::string& dep);
// same with an arbitrary function treated as an additional dependent variable
Expr euler_operator_arb(const Expr& L, const std::string& fn);

// X(e) = sum_{alpha,J} D_J(Q^alpha) de/du^alpha_J
Expr prolonged_action(const std::map<std::string, Expr>& q, const Expr& e);

struct VariationalCheck {
    std::string variable;
    bool is_arbitrary = false;
    Verdict verdict;
};

struct VariationalReport {
    bool variational = true;
    Expr action_variation;  // X(L)
    std::vector<VariationalCheck> checks;
};

// A local expression is a total divergence iff all its Euler expressions
// vanish; arbitrary functions count as dependent variables here.
VariationalReport variational_report(const Expr& L, const std::map<std::string, Expr>& q,
                                     const ZeroTestOptions& opts = {});
// throws NotVariational on the first failing Euler expression
void verify_variational(const Expr& L, const std::map<std::string, Expr>& q,
                        const ZeroTestOptions& opts = {});

// P with div(P) = a*D(b) - b*D†(a), exactly; derivatives are peeled one at a
// time along the lowest nonzero axis for determinism.
FluxVector bilinear_fluxes(const Expr& a, const OperatorCell& op, const Expr& b,
                           std::size_t axes);

}  // namespace noether
