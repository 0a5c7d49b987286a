#pragma once

#include <map>
#include <string>
#include <vector>

#include "noether/diff_calculus.hpp"
#include "noether/disc_calculus.hpp"
#include "noether/errors.hpp"
#include "noether/expr.hpp"
#include "noether/operators.hpp"
#include "noether/verifier.hpp"

namespace noether {

// A symmetry characteristic Q^alpha(x,[u;gamma]) depending on a family of
// arbitrary functions.  The engine requires each component to be affine in
// the family (gamma-free parts are allowed and contribute nothing); genuinely
// nonlinear dependence raises NonlinearCharacteristic.
struct Characteristic {
    std::vector<std::string> gammas;
    std::map<std::string, Expr> components;  // keyed by dependent variable
};

struct MultiplierSet {
    std::vector<Expr> nu;  // one per constraint row, free of the gamma family
};

struct ConservationLaw {
    FluxVector fluxes;
    // div(fluxes): the exact off-shell defect, a combination of the
    // Euler-Lagrange expressions and the constraint rows
    Expr residual;
    std::string provenance;
};

// --- continuous -----------------------------------------------------------

// E_{gamma^r}(Q^alpha E_alpha(L)) for each r; gamma-free when Q is affine.
std::vector<Expr> noether2_relations(const Expr& L, const Characteristic& Q,
                                     const std::vector<std::string>& deps);

// The relation operators D^alpha_r with D^alpha_r E_alpha(L) = 0, in normal
// form (coefficients times D_K), read off Q.  rows = gammas, cols = deps.
LinearOperator relation_operators(const Characteristic& Q, const std::vector<std::string>& deps,
                                  std::size_t axes);

// Q^alpha = (D^alpha_r)†(gamma^r): characteristics rebuilt from relations.
Characteristic characteristics_from_relations(const LinearOperator& rel,
                                              const std::vector<std::string>& gammas,
                                              const std::vector<std::string>& deps);

// residual_r = E_{gamma^r}(Q^alpha E_alpha(L)) - sum_s (D_sr)†(nu^s)
std::vector<Expr> constrained_residuals(const Expr& L, const Characteristic& Q,
                                        const LinearOperator& C, const MultiplierSet& nu,
                                        const std::vector<std::string>& deps);

// Fluxes of nu^s D_sr(gamma^r) - gamma^r (D_sr)†(nu^s); residuals re-checked.
ConservationLaw conservation_law(const Expr& L, const Characteristic& Q,
                                 const LinearOperator& C, const MultiplierSet& nu,
                                 const ZeroTestOptions& opts = {});

// Substitute concrete gamma bindings (they must satisfy the constraints).
ConservationLaw specialize_claw(const ConservationLaw& cl, const LinearOperator& C,
                                const std::vector<std::string>& gammas,
                                const std::map<std::string, Expr>& bindings);

// --- discrete -------------------------------------------------------------

std::vector<Expr> noether2_relations_disc(const Expr& L, const Characteristic& Q,
                                          const std::vector<std::string>& deps);

LinearOperator relation_operators_disc(const Characteristic& Q,
                                       const std::vector<std::string>& deps, std::size_t axes);

Characteristic characteristics_from_relations_disc(const LinearOperator& rel,
                                                   const std::vector<std::string>& gammas,
                                                   const std::vector<std::string>& deps);

std::vector<Expr> constrained_residuals_disc(const Expr& L, const Characteristic& Q,
                                             const LinearOperator& C, const MultiplierSet& nu,
                                             const std::vector<std::string>& deps);

ConservationLaw conservation_law_disc(const Expr& L, const Characteristic& Q,
                                      const LinearOperator& C, const MultiplierSet& nu,
                                      const ZeroTestOptions& opts = {});

// Lattice-KdV potential link: returns nu*(u[1,0]-u[0,1]) and its defect
// against c - (u[1,1]-u[0,0])*(u[1,0]-u[0,1]); defect == 0 for the corpus
// multiplier, and defect == dpKdV residual when nu == 0.
struct PotentialLink {
    Expr product;
    Expr defect;
    bool identity_holds = false;
};
PotentialLink potential_link_check(const Expr& nu, const std::string& dep,
                                   const std::string& c_param);

}  // namespace noether
