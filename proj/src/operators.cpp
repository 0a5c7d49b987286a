#include "noether/operators.hpp"

#include "noether/diff_calculus.hpp"
#include "noether/disc_calculus.hpp"
#include "noether/errors.hpp"

namespace noether {

LinearOperator::LinearOperator(OperatorKind kind, std::size_t rows, std::size_t cols,
                               std::size_t axes)
    : kind_(kind), rows_(rows), cols_(cols), axes_(axes), cells_(rows * cols) {}

void LinearOperator::add_term(std::size_t row, std::size_t col, const MultiIndex& J,
                              const Expr& coeff) {
    if (row >= rows_ || col >= cols_) throw EngineError("operator index out of range");
    if (J.axes() != axes_) throw EngineError("operator multi-index axis mismatch");
    if (coeff.is_zero()) return;
    OperatorCell& c = cells_[row * cols_ + col];
    auto it = c.find(J);
    if (it == c.end()) {
        c.emplace(J, coeff);
    } else {
        it->second += coeff;
        if (it->second.is_zero()) c.erase(it);
    }
}

const OperatorCell& LinearOperator::cell(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) throw EngineError("operator index out of range");
    return cells_[row * cols_ + col];
}

bool LinearOperator::row_nonzero(std::size_t row) const {
    for (std::size_t c = 0; c < cols_; ++c) {
        if (!cell(row, c).empty()) return true;
    }
    return false;
}

Expr apply_operator_cell(const OperatorCell& cell, OperatorKind kind, const Expr& f) {
    Expr acc;
    for (const auto& [J, coeff] : cell) {
        if (kind == OperatorKind::Differential) {
            acc += coeff * total_derivative_multi(f, J);
        } else {
            acc += coeff * shift(f, J);
        }
    }
    return acc;
}

Expr adjoint_apply_operator_cell(const OperatorCell& cell, OperatorKind kind, const Expr& f) {
    Expr acc;
    for (const auto& [J, coeff] : cell) {
        if (kind == OperatorKind::Differential) {
            Expr t = total_derivative_multi(coeff * f, J);
            acc += (J.order() % 2 == 0) ? t : -t;
        } else {
            acc += shift(coeff * f, J.negated());
        }
    }
    return acc;
}

OperatorCell adjoint_cell(const OperatorCell& cell, OperatorKind kind, std::size_t axes) {
    OperatorCell out;
    auto add = [&out](const MultiIndex& K, const Expr& e) {
        if (e.is_zero()) return;
        auto it = out.find(K);
        if (it == out.end()) {
            out.emplace(K, e);
        } else {
            it->second += e;
            if (it->second.is_zero()) out.erase(it);
        }
    };
    for (const auto& [J, c] : cell) {
        if (kind == OperatorKind::Difference) {
            add(J.negated(), shift(c, J.negated()));
            continue;
        }
        // expand (-D)_J(c .) one derivative at a time:
        // -D_i(e_K D_K .) = -D_i(e_K) D_K . - e_K D_{K+e_i} .
        std::map<MultiIndex, Expr> cur;
        cur.emplace(MultiIndex::zero(IndexMode::Derivative, axes), c);
        MultiIndex left = J;
        while (left.order() > 0) {
            std::size_t i = 0;
            while (left[i] == 0) ++i;
            left = left.plus_axis(i, -1);
            std::map<MultiIndex, Expr> next;
            for (const auto& [K, e] : cur) {
                Expr de = total_derivative(e, i);
                if (!de.is_zero()) next[K] -= de;
                next[K.plus_axis(i, 1)] -= e;
            }
            cur = std::move(next);
        }
        for (const auto& [K, e] : cur) add(K, e);
    }
    return out;
}

Expr LinearOperator::apply_cell(std::size_t row, std::size_t col, const Expr& f) const {
    return apply_operator_cell(cell(row, col), kind_, f);
}

Expr LinearOperator::adjoint_apply_cell(std::size_t row, std::size_t col, const Expr& f) const {
    return adjoint_apply_operator_cell(cell(row, col), kind_, f);
}

Expr LinearOperator::apply_row(std::size_t row, const std::vector<Expr>& args) const {
    if (args.size() != cols_) throw EngineError("operator row applied to wrong arity");
    Expr acc;
    for (std::size_t c = 0; c < cols_; ++c) acc += apply_cell(row, c, args[c]);
    return acc;
}

Expr FluxVector::divergence() const {
    Expr acc;
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (components[i].is_zero()) continue;
        acc += kind == OperatorKind::Differential ? total_derivative(components[i], i)
                                                  : forward_difference(components[i], i);
    }
    return acc;
}

FluxVector& FluxVector::operator+=(const FluxVector& other) {
    if (components.size() != other.components.size() || kind != other.kind) {
        throw EngineError("flux vector shape mismatch");
    }
    for (std::size_t i = 0; i < components.size(); ++i) components[i] += other.components[i];
    return *this;
}

Expr bind_arbitrary(const Expr& e, const std::map<std::string, Expr>& bindings,
                    OperatorKind kind) {
    std::map<Atom, Expr> table;
    e.for_each_atom([&](const Atom& a) {
        if (a.kind != AtomKind::ArbJet) return;
        auto it = bindings.find(a.name);
        if (it == bindings.end()) return;
        if (table.count(a)) return;
        Expr v = kind == OperatorKind::Differential ? total_derivative_multi(it->second, a.index)
                                                    : shift(it->second, a.index);
        table.emplace(a, std::move(v));
    });
    return e.substituted(table);
}

LinearOperator operator_from_rows(const std::vector<Expr>& rows,
                                  const std::vector<std::string>& gammas, OperatorKind kind,
                                  std::size_t axes) {
    LinearOperator op(kind, rows.size(), gammas.size(), axes);
    std::set<std::string> family(gammas.begin(), gammas.end());
    for (std::size_t s = 0; s < rows.size(); ++s) {
        const Expr& row = rows[s];
        if (!is_linear_homogeneous(row, family)) {
            throw ConstraintNotLinear("constraint row " + std::to_string(s + 1) +
                                      " is not linear homogeneous in the arbitrary functions");
        }
        Expr rebuilt;
        for (const Atom& a : row.atoms()) {
            if (a.kind != AtomKind::ArbJet || !family.count(a.name)) continue;
            Expr coeff = row.diff(a);
            if (coeff.is_zero()) continue;
            std::size_t col = 0;
            while (gammas[col] != a.name) ++col;
            op.add_term(s, col, a.index, coeff);
            rebuilt += coeff * Expr::atom(a);
        }
        if (rebuilt != row) {
            throw ConstraintNotLinear("constraint row " + std::to_string(s + 1) +
                                      " does not decompose as a linear operator");
        }
        if (!op.row_nonzero(s)) {
            throw ConstraintNotLinear("constraint row " + std::to_string(s + 1) + " is empty");
        }
    }
    return op;
}

}  // namespace noether
