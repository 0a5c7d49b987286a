#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "noether/expr.hpp"
#include "noether/multi_index.hpp"

namespace noether {

enum class OperatorKind { Differential, Difference };

// One matrix entry of a linear operator: a finite sum of coeff * D_J
// (differential) or coeff * S_J (difference) monomials.
using OperatorCell = std::map<MultiIndex, Expr>;

// Finite matrix of linear differential / difference operators; the D_sr of
// constraint sets and the D^alpha_r of the relation theorems.
class LinearOperator {
public:
    LinearOperator(OperatorKind kind, std::size_t rows, std::size_t cols, std::size_t axes);

    OperatorKind kind() const { return kind_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t axes() const { return axes_; }

    void add_term(std::size_t row, std::size_t col, const MultiIndex& J, const Expr& coeff);
    const OperatorCell& cell(std::size_t row, std::size_t col) const;
    bool row_nonzero(std::size_t row) const;

    // D(f): sum of coeff * D_J f  (or coeff * S_J f)
    Expr apply_cell(std::size_t row, std::size_t col, const Expr& f) const;
    // D†(f): sum of (-D)_J(coeff * f)  (or S_{-J}(coeff * f))
    Expr adjoint_apply_cell(std::size_t row, std::size_t col, const Expr& f) const;
    // row applied to a vector of arguments, one per column
    Expr apply_row(std::size_t row, const std::vector<Expr>& args) const;

private:
    OperatorKind kind_;
    std::size_t rows_;
    std::size_t cols_;
    std::size_t axes_;
    std::vector<OperatorCell> cells_;
};

Expr apply_operator_cell(const OperatorCell& cell, OperatorKind kind, const Expr& f);
Expr adjoint_apply_operator_cell(const OperatorCell& cell, OperatorKind kind, const Expr& f);

// The formal adjoint as an operator in normal form: sum of coeff * D_K
// (Leibniz-expanded) or coeff * S_K monomials.
OperatorCell adjoint_cell(const OperatorCell& cell, OperatorKind kind, std::size_t axes);

// The formal adjoint as a first-class applicable object.
struct AdjointOperator {
    OperatorKind kind;
    OperatorCell cell;
    Expr operator()(const Expr& f) const { return adjoint_apply_operator_cell(cell, kind, f); }
};

inline AdjointOperator adjoint(const OperatorCell& cell, OperatorKind kind) {
    return AdjointOperator{kind, cell};
}

// Flux tuple P^1..P^p; its total divergence is sum_i D_i P^i (or the forward
// difference analogue).
struct FluxVector {
    OperatorKind kind = OperatorKind::Differential;
    std::vector<Expr> components;

    FluxVector() = default;
    FluxVector(OperatorKind k, std::size_t axes) : kind(k), components(axes) {}

    std::size_t axes() const { return components.size(); }
    Expr divergence() const;
    FluxVector& operator+=(const FluxVector& other);
};

// Substitute concrete expressions for the arbitrary functions: every
// gamma^r-jet atom becomes D_J (or S_J) of the binding.
Expr bind_arbitrary(const Expr& e, const std::map<std::string, Expr>& bindings,
                    OperatorKind kind);

// Read the operator matrix off expressions that are linear homogeneous in the
// arbitrary functions: rows[s] = sum_r D_sr(gamma^r).  Throws
// ConstraintNotLinear when a row fails to decompose.
LinearOperator operator_from_rows(const std::vector<Expr>& rows,
                                  const std::vector<std::string>& gammas, OperatorKind kind,
                                  std::size_t axes);

}  // namespace noether
