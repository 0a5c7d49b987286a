#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noether/expr.hpp"
#include "noether/operators.hpp"

namespace noether {

// Parsed .n2 problem description: one continuous or discrete variational
// problem with optional constraints, multipliers and golden expectations.
struct ProblemFile {
    std::string name;
    OperatorKind kind = OperatorKind::Differential;
    std::vector<std::string> axes;
    std::vector<std::string> deps;
    std::map<std::string, std::string> conj_pairs;  // symmetric closure
    std::vector<std::pair<std::string, bool>> params;  // name, is_real
    std::vector<std::string> arbitrary;

    Expr lagrangian;
    std::map<std::string, Expr> characteristic;  // per dependent, default 0
    std::vector<Expr> constraint_rows;
    std::map<int, Expr> multipliers;  // 1-based row index

    // optional corpus check: potential-link constant parameter name
    std::optional<std::string> potential_link_param;

    std::map<std::string, Expr> expect_euler;     // by dependent
    std::map<int, Expr> expect_relation;          // by 1-based index
    std::map<int, Expr> expect_residual;          // by 1-based index
    std::map<std::string, Expr> expect_flux;      // by axis name

    IndexMode index_mode() const {
        return kind == OperatorKind::Differential ? IndexMode::Derivative : IndexMode::Shift;
    }
    bool has_characteristic() const;
    std::size_t axis_of(const std::string& name) const;
};

ProblemFile parse_problem(const std::string& text, const std::string& fallback_name = "");
ProblemFile parse_problem_file(const std::string& path);

// Regenerates DSL text; parse(print(parse(t))) == parse(t).
std::string print_problem(const ProblemFile& p);

// Expression parser against a problem's declarations (used by tests and by
// the expect blocks).
Expr parse_expression(const std::string& text, const ProblemFile& context);

}  // namespace noether
