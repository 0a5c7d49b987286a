#include "noether/disc_calculus.hpp"

#include <algorithm>

#include "noether/errors.hpp"

namespace noether {

namespace {

void require_shift_mode(const Atom& a) {
    if (a.is_jet_like() && a.index.mode() != IndexMode::Shift) {
        throw EngineError("lattice calculus applied to derivative-mode expression");
    }
}

}  // namespace

Expr shift(const Expr& e, const MultiIndex& J) {
    if (J.mode() != IndexMode::Shift) throw EngineError("shift requires a shift-mode multi-index");
    if (J.is_zero()) return e;
    std::map<Atom, Expr> table;
    e.for_each_atom([&](const Atom& a) {
        if (a.is_jet_like()) {
            require_shift_mode(a);
            Atom moved = a;
            moved.index = a.index.plus(J);
            table.emplace(a, Expr::atom(moved));
        } else if (a.kind == AtomKind::Independent && a.axis < J.axes()) {
            table.emplace(a, Expr::atom(a) + Expr(J[a.axis]));
        }
    });
    return e.substituted(table);
}

Expr shift_axis(const Expr& e, std::size_t axis, int step) {
    std::size_t axes = axis + 1;
    bool found = false;
    e.for_each_atom([&](const Atom& a) {
        if (a.is_jet_like()) {
            axes = std::max(axes, a.index.axes());
            found = true;
        } else if (a.kind == AtomKind::Independent) {
            axes = std::max(axes, a.axis + 1);
            found = true;
        }
    });
    if (!found) return e;  // no lattice content: shifting constants is the identity
    return shift(e, MultiIndex::unit(IndexMode::Shift, axes, axis, step));
}

Expr forward_difference(const Expr& e, std::size_t axis) {
    return shift_axis(e, axis, 1) - e;
}

LatticeProblemFrame::LatticeProblemFrame(std::size_t p, std::vector<std::string> steps)
    : axes(p), step_symbols(std::move(steps)) {
    if (axes < 1) throw EngineError("lattice frame needs at least one axis");
    if (!step_symbols.empty() && step_symbols.size() != axes) {
        throw EngineError("step symbols must match the axis count");
    }
}

Expr LatticeProblemFrame::step(std::size_t axis) const {
    if (step_symbols.empty()) throw EngineError("lattice frame has no step symbols");
    return Expr::atom(Atom::parameter(step_symbols.at(axis)));
}

Expr scaled_forward_difference(const Expr& e, std::size_t axis, const Expr& step) {
    return forward_difference(e, axis) / step;
}

Expr scaled_forward_difference(const Expr& e, std::size_t axis,
                               const LatticeProblemFrame& frame) {
    return scaled_forward_difference(e, axis, frame.step(axis));
}

namespace {

Expr discrete_euler_impl(const Expr& L, AtomKind kind, const std::string& name) {
    Expr acc;
    for (const Atom& a : L.atoms()) {
        if (a.kind != kind || a.name != name) continue;
        require_shift_mode(a);
        Expr p = L.diff(a);
        if (p.is_zero()) continue;
        acc += shift(p, a.index.negated());
    }
    return acc;
}

}  // namespace

Expr discrete_euler(const Expr& L, const std::string& dep) {
    return discrete_euler_impl(L, AtomKind::Jet, dep);
}

Expr discrete_euler_arb(const Expr& L, const std::string& fn) {
    return discrete_euler_impl(L, AtomKind::ArbJet, fn);
}

Expr prolonged_action_disc(const std::map<std::string, Expr>& q, const Expr& e) {
    Expr acc;
    for (const Atom& a : e.atoms()) {
        if (a.kind != AtomKind::Jet) continue;
        auto it = q.find(a.name);
        if (it == q.end()) continue;
        require_shift_mode(a);
        Expr d = e.diff(a);
        if (d.is_zero()) continue;
        acc += d * shift(it->second, a.index);
    }
    return acc;
}

VariationalReport variational_report_disc(const Expr& L, const std::map<std::string, Expr>& q,
                                          const ZeroTestOptions& opts) {
    VariationalReport rep;
    rep.action_variation = prolonged_action_disc(q, L);
    std::set<std::string> deps, arbs;
    rep.action_variation.for_each_atom([&](const Atom& a) {
        if (a.kind == AtomKind::Jet) deps.insert(a.name);
        if (a.kind == AtomKind::ArbJet) arbs.insert(a.name);
    });
    for (const auto& name : deps) {
        VariationalCheck c;
        c.variable = name;
        c.verdict = zero_test(discrete_euler(rep.action_variation, name), opts);
        rep.variational = rep.variational && c.verdict.ok();
        rep.checks.push_back(std::move(c));
    }
    for (const auto& name : arbs) {
        VariationalCheck c;
        c.variable = name;
        c.is_arbitrary = true;
        c.verdict = zero_test(discrete_euler_arb(rep.action_variation, name), opts);
        rep.variational = rep.variational && c.verdict.ok();
        rep.checks.push_back(std::move(c));
    }
    return rep;
}

void verify_variational_disc(const Expr& L, const std::map<std::string, Expr>& q,
                             const ZeroTestOptions& opts) {
    VariationalReport rep = variational_report_disc(L, q, opts);
    for (const auto& c : rep.checks) {
        if (!c.verdict.ok()) {
            Expr residual = c.is_arbitrary
                                ? discrete_euler_arb(rep.action_variation, c.variable)
                                : discrete_euler(rep.action_variation, c.variable);
            throw NotVariational(c.variable, residual.str());
        }
    }
}

FluxVector discrete_bilinear_fluxes(const Expr& a, const OperatorCell& op, const Expr& b,
                                    std::size_t axes) {
    FluxVector P(OperatorKind::Difference, axes);
    for (const auto& [J, coeff] : op) {
        Expr f = coeff * a;
        MultiIndex cur = J;
        while (cur.order() > 0) {
            std::size_t i = 0;
            while (cur[i] == 0) ++i;
            if (cur[i] > 0) {
                // f*S_i(h) = (S_i^-1 f)*h + D~_i(S_i^-1 f * h)
                cur = cur.plus_axis(i, -1);
                f = shift_axis(f, i, -1);
                P.components[i] += f * shift(b, cur);
            } else {
                // f*S_i^-1(h) = (S_i f)*h - D~_i(f * S_i^-1 h)
                P.components[i] -= f * shift(b, cur);
                cur = cur.plus_axis(i, 1);
                f = shift_axis(f, i, 1);
            }
        }
    }
    Expr pairing = a * apply_operator_cell(op, OperatorKind::Difference, b) -
                   b * adjoint_apply_operator_cell(op, OperatorKind::Difference, a);
    if (P.divergence() != pairing) {
        throw EngineError("internal: telescoped flux divergence defect");
    }
    return P;
}

}  // namespace noether
