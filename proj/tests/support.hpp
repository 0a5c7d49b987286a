#pragma once

// Shared helpers for the test suites: atom builders, a random expression
// generator with an independent AST evaluator (the oracle for
// canonicalization-preserves-value checks), and corpus file locations.

#include <complex>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "noether/eval.hpp"
#include "noether/expr.hpp"

#ifndef NOETHER_CORPUS_DIR
#define NOETHER_CORPUS_DIR "corpus"
#endif

namespace testsupport {

using namespace noether;

inline std::string corpus_path(const std::string& name) {
    return std::string(NOETHER_CORPUS_DIR) + "/" + name;
}

inline Atom djet(const std::string& n, std::vector<int> j) {
    return Atom::jet(n, MultiIndex(IndexMode::Derivative, std::move(j)));
}
inline Atom sjet(const std::string& n, std::vector<int> j) {
    return Atom::jet(n, MultiIndex(IndexMode::Shift, std::move(j)));
}
inline Atom darb(const std::string& n, std::vector<int> j) {
    return Atom::arb(n, MultiIndex(IndexMode::Derivative, std::move(j)));
}
inline Atom sarb(const std::string& n, std::vector<int> j) {
    return Atom::arb(n, MultiIndex(IndexMode::Shift, std::move(j)));
}
inline Expr E(Atom a) { return Expr::atom(std::move(a)); }

// ---------------------------------------------------------------------------
// independent AST with its own evaluator

struct AstNode {
    enum Kind { Leaf, Const, Add, Mul, Neg, Pow, Fn } kind = Const;
    Atom atom;                 // Leaf
    long value = 0;            // Const
    int exponent = 1;          // Pow
    int fn = 0;                // 0 exp, 1 ln, 2 sin, 3 cos
    std::vector<std::shared_ptr<AstNode>> kids;
};

using AstPtr = std::shared_ptr<AstNode>;

struct RandomExprGen {
    std::mt19937_64 rng;
    std::vector<Atom> pool;
    bool allow_fns = false;

    explicit RandomExprGen(std::uint64_t seed, std::vector<Atom> atoms, bool fns = false)
        : rng(seed), pool(std::move(atoms)), allow_fns(fns) {}

    long pick(long lo, long hi) {
        return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
    }

    AstPtr gen(int depth) {
        auto node = std::make_shared<AstNode>();
        long roll = pick(0, depth <= 0 ? 1 : 9);
        if (roll <= 0) {
            node->kind = AstNode::Const;
            node->value = pick(-4, 4);
            return node;
        }
        if (roll <= 1 || depth <= 0) {
            node->kind = AstNode::Leaf;
            node->atom = pool[static_cast<std::size_t>(pick(0, static_cast<long>(pool.size()) - 1))];
            return node;
        }
        if (roll <= 4) {
            node->kind = AstNode::Add;
            node->kids = {gen(depth - 1), gen(depth - 1)};
            return node;
        }
        if (roll <= 7) {
            node->kind = AstNode::Mul;
            node->kids = {gen(depth - 1), gen(depth - 1)};
            return node;
        }
        if (roll == 8) {
            node->kind = AstNode::Neg;
            node->kids = {gen(depth - 1)};
            return node;
        }
        if (allow_fns && pick(0, 1) == 0) {
            node->kind = AstNode::Fn;
            node->fn = static_cast<int>(pick(0, 3));
            node->kids = {gen(depth - 1)};
            return node;
        }
        node->kind = AstNode::Pow;
        node->exponent = static_cast<int>(pick(2, 3));
        node->kids = {gen(depth - 1)};
        return node;
    }
};

inline Expr ast_to_expr(const AstPtr& n) {
    switch (n->kind) {
        case AstNode::Leaf:
            return Expr::atom(n->atom);
        case AstNode::Const:
            return Expr(n->value);
        case AstNode::Add:
            return ast_to_expr(n->kids[0]) + ast_to_expr(n->kids[1]);
        case AstNode::Mul:
            return ast_to_expr(n->kids[0]) * ast_to_expr(n->kids[1]);
        case AstNode::Neg:
            return -ast_to_expr(n->kids[0]);
        case AstNode::Pow:
            return pow(ast_to_expr(n->kids[0]), static_cast<long>(n->exponent));
        case AstNode::Fn: {
            Expr a = ast_to_expr(n->kids[0]);
            switch (n->fn) {
                case 0: return exp(a);
                case 1: return ln(a);
                case 2: return sin(a);
                default: return cos(a);
            }
        }
    }
    return Expr();
}

// direct recursive evaluation, independent of the canonical machinery
inline std::complex<long double> ast_eval(const AstPtr& n,
                                          const std::map<Atom, long double>& pt) {
    using C = std::complex<long double>;
    switch (n->kind) {
        case AstNode::Leaf:
            return C(pt.at(n->atom));
        case AstNode::Const:
            return C(static_cast<long double>(n->value));
        case AstNode::Add:
            return ast_eval(n->kids[0], pt) + ast_eval(n->kids[1], pt);
        case AstNode::Mul:
            return ast_eval(n->kids[0], pt) * ast_eval(n->kids[1], pt);
        case AstNode::Neg:
            return -ast_eval(n->kids[0], pt);
        case AstNode::Pow: {
            C b = ast_eval(n->kids[0], pt);
            C acc(1);
            for (int k = 0; k < n->exponent; ++k) acc *= b;
            return acc;
        }
        case AstNode::Fn: {
            C a = ast_eval(n->kids[0], pt);
            switch (n->fn) {
                case 0: return std::exp(a);
                case 1: return std::log(a);
                case 2: return std::sin(a);
                default: return std::cos(a);
            }
        }
    }
    return {};
}

// polynomial-only random expression straight at the Expr level (for the
// calculus property suites)
inline Expr random_poly_expr(std::mt19937_64& rng, const std::vector<Atom>& pool, int terms,
                             int max_factors = 3) {
    auto pick = [&rng](long lo, long hi) {
        return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
    };
    Expr acc;
    for (int t = 0; t < terms; ++t) {
        Expr term{pick(-5, 5)};
        long nf = pick(1, max_factors);
        for (long f = 0; f < nf; ++f) {
            const Atom& a = pool[static_cast<std::size_t>(
                pick(0, static_cast<long>(pool.size()) - 1))];
            term = term * Expr::atom(a);
        }
        acc += term;
    }
    return acc;
}

}  // namespace testsupport
