#pragma once

#include <map>
#include <string>
#include <vector>

#include "noether/diff_calculus.hpp"
#include "noether/expr.hpp"
#include "noether/operators.hpp"
#include "noether/verifier.hpp"

namespace noether {

// Lattice calculus.  Values at distinct offsets are independent atoms; there
// is no interpolation or continuum embedding.

// Geometry of a lattice problem: axis count plus optional symbolic step
// lengths for the scaled differences (S_i - id)/h^i.
struct LatticeProblemFrame {
    std::size_t axes = 1;
    std::vector<std::string> step_symbols;  // empty, or one nonzero parameter per axis

    LatticeProblemFrame(std::size_t p, std::vector<std::string> steps = {});
    Expr step(std::size_t axis) const;
};

// S_J: jet offsets translate by J, independent variables n^i pick up j^i.
Expr shift(const Expr& e, const MultiIndex& J);
Expr shift_axis(const Expr& e, std::size_t axis, int step = 1);

// forward difference S_i - id
Expr forward_difference(const Expr& e, std::size_t axis);
// scaled difference (S_i - id)/h with a symbolic step
Expr scaled_forward_difference(const Expr& e, std::size_t axis, const Expr& step);
Expr scaled_forward_difference(const Expr& e, std::size_t axis,
                               const LatticeProblemFrame& frame);

// E~_alpha(L) = sum_J S_{-J} (dL/d S_J u^alpha)
Expr discrete_euler(const Expr& L, const std::string& dep);
Expr discrete_euler_arb(const Expr& L, const std::string& fn);

Expr prolonged_action_disc(const std::map<std::string, Expr>& q, const Expr& e);

VariationalReport variational_report_disc(const Expr& L, const std::map<std::string, Expr>& q,
                                          const ZeroTestOptions& opts = {});
void verify_variational_disc(const Expr& L, const std::map<std::string, Expr>& q,
                             const ZeroTestOptions& opts = {});

// P with sum_i D~_i P^i = a*D(b) - b*D†(a), by telescoping one unit shift at
// a time along the lowest nonzero axis.
FluxVector discrete_bilinear_fluxes(const Expr& a, const OperatorCell& op, const Expr& b,
                                    std::size_t axes);

}  // namespace noether
