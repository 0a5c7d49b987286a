#include "noether/noether2.hpp"

#include <set>

#include "noether/errors.hpp"

namespace noether {

namespace {

// affine in the family: every term of degree 0 or 1, kernels and
// denominators family-free; the gamma-free part contributes nothing to the
// relations, so it is tolerated
bool is_affine_in_family(const Expr& e, const std::set<std::string>& family) {
    bool mentions = false;
    e.for_each_atom([&](const Atom& a) {
        if (a.kind == AtomKind::ArbJet && family.count(a.name)) mentions = true;
    });
    if (!mentions) return true;
    Expr gamma_part;
    for (const Atom& a : e.atoms()) {
        if (a.kind != AtomKind::ArbJet || !family.count(a.name)) continue;
        Expr c = e.diff(a);
        // nonlinear or kernel-mediated dependence leaves gamma in the
        // coefficient; linear dependence does not
        for (const std::string& g : family) {
            if (c.depends_on_name(AtomKind::ArbJet, g)) return false;
        }
        gamma_part += c * Expr::atom(a);
    }
    Expr rest = e - gamma_part;
    for (const std::string& g : family) {
        if (rest.depends_on_name(AtomKind::ArbJet, g)) return false;
    }
    return true;
}

void check_characteristic(const Characteristic& Q) {
    std::set<std::string> family(Q.gammas.begin(), Q.gammas.end());
    for (const auto& [dep, q] : Q.components) {
        if (!is_affine_in_family(q, family)) {
            throw NonlinearCharacteristic("Q^" + dep +
                                          " is nonlinear in the arbitrary functions");
        }
    }
}

void check_gamma_free(const Expr& e, const Characteristic& Q, const char* what) {
    for (const std::string& g : Q.gammas) {
        if (e.depends_on_name(AtomKind::ArbJet, g)) {
            throw EngineError(std::string("internal: ") + what +
                              " failed to eliminate the arbitrary functions");
        }
    }
}

Expr hat_lagrangian(const Expr& L, const Characteristic& Q,
                    const std::vector<std::string>& deps, OperatorKind kind) {
    Expr m;
    for (const std::string& dep : deps) {
        auto it = Q.components.find(dep);
        if (it == Q.components.end() || it->second.is_zero()) continue;
        Expr E = kind == OperatorKind::Differential ? euler_operator(L, dep)
                                                    : discrete_euler(L, dep);
        m += it->second * E;
    }
    return m;
}

std::vector<Expr> relations_impl(const Expr& L, const Characteristic& Q,
                                 const std::vector<std::string>& deps, OperatorKind kind) {
    check_characteristic(Q);
    Expr m = hat_lagrangian(L, Q, deps, kind);
    std::vector<Expr> rel;
    rel.reserve(Q.gammas.size());
    for (const std::string& g : Q.gammas) {
        Expr r = kind == OperatorKind::Differential ? euler_operator_arb(m, g)
                                                    : discrete_euler_arb(m, g);
        check_gamma_free(r, Q, "relation extraction");
        rel.push_back(std::move(r));
    }
    return rel;
}

LinearOperator relation_operators_impl(const Characteristic& Q,
                                       const std::vector<std::string>& deps, std::size_t axes,
                                       OperatorKind kind) {
    check_characteristic(Q);
    LinearOperator op(kind, Q.gammas.size(), deps.size(), axes);
    for (std::size_t r = 0; r < Q.gammas.size(); ++r) {
        for (std::size_t a = 0; a < deps.size(); ++a) {
            auto it = Q.components.find(deps[a]);
            if (it == Q.components.end()) continue;
            const Expr& q = it->second;
            // D^alpha_r acts on E_alpha as f |-> (-D)_J(dQ^alpha/dgamma^r_J * f)
            OperatorCell raw;
            for (const Atom& atom : q.atoms()) {
                if (atom.kind != AtomKind::ArbJet || atom.name != Q.gammas[r]) continue;
                Expr c = q.diff(atom);
                if (!c.is_zero()) raw.emplace(atom.index, std::move(c));
            }
            for (const auto& [K, e] : adjoint_cell(raw, kind, axes)) op.add_term(r, a, K, e);
        }
    }
    return op;
}

Characteristic characteristics_impl(const LinearOperator& rel,
                                    const std::vector<std::string>& gammas,
                                    const std::vector<std::string>& deps) {
    if (rel.rows() != gammas.size() || rel.cols() != deps.size()) {
        throw EngineError("relation operator shape does not match names");
    }
    IndexMode mode =
        rel.kind() == OperatorKind::Differential ? IndexMode::Derivative : IndexMode::Shift;
    Characteristic Q;
    Q.gammas = gammas;
    for (std::size_t a = 0; a < deps.size(); ++a) {
        Expr q;
        for (std::size_t r = 0; r < gammas.size(); ++r) {
            Expr g = Expr::atom(Atom::arb(gammas[r], MultiIndex::zero(mode, rel.axes())));
            q += rel.adjoint_apply_cell(r, a, g);
        }
        Q.components[deps[a]] = std::move(q);
    }
    return Q;
}

std::vector<Expr> residuals_impl(const Expr& L, const Characteristic& Q,
                                 const LinearOperator& C, const MultiplierSet& nu,
                                 const std::vector<std::string>& deps, OperatorKind kind) {
    if (C.cols() != Q.gammas.size()) throw EngineError("constraint columns != gamma count");
    if (nu.nu.size() != C.rows()) throw EngineError("multiplier count != constraint rows");
    for (const Expr& n : nu.nu) {
        for (const std::string& g : Q.gammas) {
            if (n.depends_on_name(AtomKind::ArbJet, g)) {
                throw EngineError("multiplier depends on an arbitrary function");
            }
        }
    }
    std::vector<Expr> rel = relations_impl(L, Q, deps, kind);
    for (std::size_t r = 0; r < rel.size(); ++r) {
        for (std::size_t s = 0; s < C.rows(); ++s) {
            rel[r] -= adjoint_apply_operator_cell(C.cell(s, r), kind, nu.nu[s]);
        }
    }
    return rel;
}

ConservationLaw claw_impl(const Expr& L, const Characteristic& Q, const LinearOperator& C,
                          const MultiplierSet& nu, const std::vector<std::string>& deps,
                          const ZeroTestOptions& opts, OperatorKind kind) {
    std::vector<Expr> res = residuals_impl(L, Q, C, nu, deps, kind);
    for (std::size_t r = 0; r < res.size(); ++r) {
        Verdict v = zero_test(res[r], opts);
        if (!v.ok()) {
            throw ResidualNonzero("residual " + std::to_string(r + 1) +
                                  " is not zero: " + res[r].str());
        }
    }
    IndexMode mode =
        kind == OperatorKind::Differential ? IndexMode::Derivative : IndexMode::Shift;
    ConservationLaw cl;
    cl.fluxes = FluxVector(kind, C.axes());
    Expr pairing;
    for (std::size_t s = 0; s < C.rows(); ++s) {
        for (std::size_t r = 0; r < C.cols(); ++r) {
            const OperatorCell& cell = C.cell(s, r);
            if (cell.empty()) continue;
            Expr g = Expr::atom(Atom::arb(Q.gammas[r], MultiIndex::zero(mode, C.axes())));
            cl.fluxes += kind == OperatorKind::Differential
                             ? bilinear_fluxes(nu.nu[s], cell, g, C.axes())
                             : discrete_bilinear_fluxes(nu.nu[s], cell, g, C.axes());
            pairing += nu.nu[s] * apply_operator_cell(cell, kind, g) -
                       g * adjoint_apply_operator_cell(cell, kind, nu.nu[s]);
        }
    }
    cl.residual = cl.fluxes.divergence();
    if (cl.residual != pairing) {
        throw EngineError("internal: flux divergence disagrees with the bilinear pairing");
    }
    cl.provenance = "bilinear concomitant of constraint rows against multipliers";
    return cl;
}

}  // namespace

std::vector<Expr> noether2_relations(const Expr& L, const Characteristic& Q,
                                     const std::vector<std::string>& deps) {
    return relations_impl(L, Q, deps, OperatorKind::Differential);
}

LinearOperator relation_operators(const Characteristic& Q, const std::vector<std::string>& deps,
                                  std::size_t axes) {
    return relation_operators_impl(Q, deps, axes, OperatorKind::Differential);
}

Characteristic characteristics_from_relations(const LinearOperator& rel,
                                              const std::vector<std::string>& gammas,
                                              const std::vector<std::string>& deps) {
    return characteristics_impl(rel, gammas, deps);
}

std::vector<Expr> constrained_residuals(const Expr& L, const Characteristic& Q,
                                        const LinearOperator& C, const MultiplierSet& nu,
                                        const std::vector<std::string>& deps) {
    return residuals_impl(L, Q, C, nu, deps, OperatorKind::Differential);
}

ConservationLaw conservation_law(const Expr& L, const Characteristic& Q,
                                 const LinearOperator& C, const MultiplierSet& nu,
                                 const ZeroTestOptions& opts) {
    std::vector<std::string> deps;
    for (const auto& [dep, q] : Q.components) deps.push_back(dep);
    return claw_impl(L, Q, C, nu, deps, opts, OperatorKind::Differential);
}

ConservationLaw specialize_claw(const ConservationLaw& cl, const LinearOperator& C,
                                const std::vector<std::string>& gammas,
                                const std::map<std::string, Expr>& bindings) {
    if (C.cols() != gammas.size()) throw EngineError("constraint columns != gamma count");
    for (const std::string& g : gammas) {
        if (!bindings.count(g)) throw EngineError("missing gamma binding for " + g);
    }
    // the bindings must satisfy the constraints symbolically
    for (std::size_t s = 0; s < C.rows(); ++s) {
        Expr row;
        for (std::size_t r = 0; r < C.cols(); ++r) {
            row += apply_operator_cell(C.cell(s, r), C.kind(), bindings.at(gammas[r]));
        }
        Verdict v = zero_test(row);
        if (!v.ok()) {
            throw ConstraintViolated("gamma bindings violate constraint row " +
                                     std::to_string(s + 1));
        }
    }
    ConservationLaw out;
    out.fluxes = FluxVector(C.kind(), cl.fluxes.axes());
    for (std::size_t i = 0; i < cl.fluxes.axes(); ++i) {
        out.fluxes.components[i] = bind_arbitrary(cl.fluxes.components[i], bindings, C.kind());
    }
    out.residual = out.fluxes.divergence();
    out.provenance = cl.provenance + "; specialized";
    return out;
}

std::vector<Expr> noether2_relations_disc(const Expr& L, const Characteristic& Q,
                                          const std::vector<std::string>& deps) {
    return relations_impl(L, Q, deps, OperatorKind::Difference);
}

LinearOperator relation_operators_disc(const Characteristic& Q,
                                       const std::vector<std::string>& deps, std::size_t axes) {
    return relation_operators_impl(Q, deps, axes, OperatorKind::Difference);
}

Characteristic characteristics_from_relations_disc(const LinearOperator& rel,
                                                   const std::vector<std::string>& gammas,
                                                   const std::vector<std::string>& deps) {
    return characteristics_impl(rel, gammas, deps);
}

std::vector<Expr> constrained_residuals_disc(const Expr& L, const Characteristic& Q,
                                             const LinearOperator& C, const MultiplierSet& nu,
                                             const std::vector<std::string>& deps) {
    return residuals_impl(L, Q, C, nu, deps, OperatorKind::Difference);
}

ConservationLaw conservation_law_disc(const Expr& L, const Characteristic& Q,
                                      const LinearOperator& C, const MultiplierSet& nu,
                                      const ZeroTestOptions& opts) {
    std::vector<std::string> deps;
    for (const auto& [dep, q] : Q.components) deps.push_back(dep);
    return claw_impl(L, Q, C, nu, deps, opts, OperatorKind::Difference);
}

PotentialLink potential_link_check(const Expr& nu, const std::string& dep,
                                   const std::string& c_param) {
    auto at = [&dep](int i, int j) {
        return Expr::atom(Atom::jet(dep, MultiIndex(IndexMode::Shift, {i, j})));
    };
    Expr c = Expr::atom(Atom::parameter(c_param));
    Expr diag = at(1, 0) - at(0, 1);
    PotentialLink link;
    link.product = nu * diag;
    link.defect = link.product - (c - (at(1, 1) - at(0, 0)) * diag);
    link.identity_holds = link.defect.is_zero();
    return link;
}

}  // namespace noether
