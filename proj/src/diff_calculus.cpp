#include "noether/diff_calculus.hpp"

#include <algorithm>

#include "noether/errors.hpp"

namespace noether {

namespace {

void require_derivative_mode(const Atom& a) {
    if (a.is_jet_like() && a.index.mode() != IndexMode::Derivative) {
        throw EngineError("continuous calculus applied to shift-mode expression");
    }
}

}  // namespace

Expr total_derivative(const Expr& e, std::size_t axis) {
    Expr acc;
    for (const Atom& a : e.atoms()) {
        if (a.is_jet_like()) {
            require_derivative_mode(a);
            Expr d = e.diff(a);
            if (d.is_zero()) continue;
            Atom bumped = a;
            bumped.index = a.index.plus_axis(axis, 1);
            acc += d * Expr::atom(bumped);
        } else if (a.kind == AtomKind::Independent && a.axis == axis) {
            acc += e.diff(a);
        }
    }
    return acc;
}

Expr total_derivative_multi(const Expr& e, const MultiIndex& J) {
    Expr r = e;
    for (std::size_t i = 0; i < J.axes(); ++i) {
        for (int k = 0; k < J[i]; ++k) r = total_derivative(r, i);
    }
    return r;
}

namespace {

Expr euler_impl(const Expr& L, AtomKind kind, const std::string& name) {
    Expr acc;
    for (const Atom& a : L.atoms()) {
        if (a.kind != kind || a.name != name) continue;
        require_derivative_mode(a);
        Expr p = L.diff(a);
        if (p.is_zero()) continue;
        Expr t = total_derivative_multi(p, a.index);
        acc += (a.index.order() % 2 == 0) ? t : -t;
    }
    return acc;
}

}  // namespace

Expr euler_operator(const Expr& L, const std::string& dep) {
    return euler_impl(L, AtomKind::Jet, dep);
}

Expr euler_operator_arb(const Expr& L, const std::string& fn) {
    return euler_impl(L, AtomKind::ArbJet, fn);
}

Expr prolonged_action(const std::map<std::string, Expr>& q, const Expr& e) {
    Expr acc;
    for (const Atom& a : e.atoms()) {
        if (a.kind != AtomKind::Jet) continue;
        auto it = q.find(a.name);
        if (it == q.end()) continue;
        require_derivative_mode(a);
        Expr d = e.diff(a);
        if (d.is_zero()) continue;
        acc += d * total_derivative_multi(it->second, a.index);
    }
    return acc;
}

VariationalReport variational_report(const Expr& L, const std::map<std::string, Expr>& q,
                                     const ZeroTestOptions& opts) {
    VariationalReport rep;
    rep.action_variation = prolonged_action(q, L);
    std::set<std::string> deps, arbs;
    rep.action_variation.for_each_atom([&](const Atom& a) {
        if (a.kind == AtomKind::Jet) deps.insert(a.name);
        if (a.kind == AtomKind::ArbJet) arbs.insert(a.name);
    });
    for (const auto& name : deps) {
        VariationalCheck c;
        c.variable = name;
        c.verdict = zero_test(euler_operator(rep.action_variation, name), opts);
        rep.variational = rep.variational && c.verdict.ok();
        rep.checks.push_back(std::move(c));
    }
    for (const auto& name : arbs) {
        VariationalCheck c;
        c.variable = name;
        c.is_arbitrary = true;
        c.verdict = zero_test(euler_operator_arb(rep.action_variation, name), opts);
        rep.variational = rep.variational && c.verdict.ok();
        rep.checks.push_back(std::move(c));
    }
    return rep;
}

void verify_variational(const Expr& L, const std::map<std::string, Expr>& q,
                        const ZeroTestOptions& opts) {
    VariationalReport rep = variational_report(L, q, opts);
    for (const auto& c : rep.checks) {
        if (!c.verdict.ok()) {
            Expr residual = c.is_arbitrary ? euler_operator_arb(rep.action_variation, c.variable)
                                           : euler_operator(rep.action_variation, c.variable);
            throw NotVariational(c.variable, residual.str());
        }
    }
}

FluxVector bilinear_fluxes(const Expr& a, const OperatorCell& op, const Expr& b,
                           std::size_t axes) {
    FluxVector P(OperatorKind::Differential, axes);
    for (const auto& [J, coeff] : op) {
        Expr f = coeff * a;
        int sign = 1;
        MultiIndex cur = J;
        while (cur.order() > 0) {
            std::size_t i = 0;
            while (cur[i] == 0) ++i;
            cur = cur.plus_axis(i, -1);
            Expr piece = f * total_derivative_multi(b, cur);
            P.components[i] += sign > 0 ? piece : -piece;
            f = total_derivative(f, i);
            sign = -sign;
        }
    }
    Expr pairing = a * apply_operator_cell(op, OperatorKind::Differential, b) -
                   b * adjoint_apply_operator_cell(op, OperatorKind::Differential, a);
    if (P.divergence() != pairing) {
        throw EngineError("internal: bilinear flux divergence defect");
    }
    return P;
}

}  // namespace noether
