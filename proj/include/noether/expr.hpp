#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "noether/atom.hpp"
#include "noether/rational.hpp"

namespace noether {

class Expr;

namespace detail {

struct Fraction;
using RepPtr = std::shared_ptr<const Fraction>;

// Non-exponential function kernels.  exp is not here: each monomial carries
// at most one exponential factor in a dedicated slot so that products of
// exponentials merge by adding arguments.
enum class Fn { Ln, Sin, Cos, Root };

struct Kernel {
    Fn fn = Fn::Ln;
    RepPtr arg;               // canonical argument expression
    unsigned root_index = 0;  // Root only: arg^(1/root_index), root_index >= 2

    int cmp(const Kernel& other) const;
};

// A multiplicand: an atom or a function kernel.
struct Base {
    bool kernel_flag = false;
    Atom atom;
    Kernel kern;

    static Base from_atom(Atom a);
    static Base from_kernel(Kernel k);
    bool is_atom() const { return !kernel_flag; }
    int cmp(const Base& other) const;
};

struct Factor {
    Base base;
    int exp = 1;  // >= 1
};

// Power product with an optional exponential part:  prod(base^exp) * exp(earg).
struct Monomial {
    std::vector<Factor> factors;  // sorted ascending by base
    RepPtr earg;                  // null when absent; never a stored zero

    int degree() const;
    bool is_unit() const { return factors.empty() && !earg; }
    int cmp(const Monomial& other) const;  // graded lex, exp-free wins ties
};

struct Term {
    CRat coef;
    Monomial mono;
};

// Expanded multivariate polynomial over Q(i) in atoms and kernels.
struct Poly {
    std::vector<Term> terms;  // sorted descending by monomial, no zero coefs

    bool is_zero() const { return terms.empty(); }
    bool is_constant() const;
    static Poly zero() { return {}; }
    static Poly constant(CRat c);
    static Poly one() { return constant(CRat(1)); }

    int cmp(const Poly& other) const;
};

// Canonical rational function num/den: gcd-reduced, den has leading
// coefficient 1 and an exponential-free leading monomial.
struct Fraction {
    Poly num;
    Poly den;

    int cmp(const Fraction& other) const;
};

}  // namespace detail

// Immutable symbolic expression over Q(i), atoms and {exp, ln, sin, cos,
// rational powers}.  Every Expr is canonical by construction: rational
// subexpressions are kept as a reduced num/den pair of expanded polynomials,
// so equal-valued rational expressions compare identical.
class Expr {
public:
    Expr();  // zero
    Expr(long long v);  // NOLINT(google-explicit-constructor)
    Expr(long v) : Expr(static_cast<long long>(v)) {}   // NOLINT
    Expr(int v) : Expr(static_cast<long long>(v)) {}    // NOLINT
    explicit Expr(const Rat& r);
    explicit Expr(const CRat& c);

    static Expr imaginary();
    static Expr atom(Atom a);
    static Expr from_rep(detail::RepPtr rep);

    bool is_zero() const;
    bool is_one() const;
    std::optional<CRat> constant_value() const;
    // True when the expression is a rational function of its atoms (no
    // function kernels anywhere): exact evaluation and exact zero testing apply.
    bool is_rational_form() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr operator-() const;
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }

    friend Expr pow(const Expr& e, long k);
    friend Expr pow(const Expr& e, const Rat& r);
    friend Expr exp(const Expr& e);
    friend Expr ln(const Expr& e);
    friend Expr sin(const Expr& e);
    friend Expr cos(const Expr& e);

    // Simultaneous, non-recursive atom replacement (result is canonical).
    Expr substituted(const std::map<Atom, Expr>& bindings) const;

    // Formal partial derivative treating every other atom as constant;
    // chain rule through function kernels.
    Expr diff(const Atom& a) const;

    void for_each_atom(const std::function<void(const Atom&)>& f) const;
    std::set<Atom> atoms() const;
    bool depends_on(const Atom& a) const;
    bool depends_on_name(AtomKind kind, const std::string& name) const;

    // Complex conjugation: i -> -i, dependent variables map through their
    // declared partner (absent partner = real), real parameters and all
    // jet-like atoms of arbitrary functions are fixed.
    Expr conjugated(const std::map<std::string, std::string>& pairs) const;

    static int compare(const Expr& a, const Expr& b);
    bool operator==(const Expr& o) const { return compare(*this, o) == 0; }
    bool operator!=(const Expr& o) const { return compare(*this, o) != 0; }
    bool operator<(const Expr& o) const { return compare(*this, o) < 0; }

    std::string str() const;
    std::string str(const std::vector<std::string>& axis_names) const;

    const detail::Fraction& rep() const { return *rep_; }
    detail::RepPtr rep_ptr() const { return rep_; }

private:
    detail::RepPtr rep_;
};

// Free-function forms of the kernel operations.  Expressions are canonical by construction,
// so canonicalize is the identity; it exists to keep the contract explicit.
inline Expr canonicalize(const Expr& e) { return e; }
Expr substitute(const Expr& e, const std::map<Atom, Expr>& bindings);
Expr partial_wrt(const Expr& e, const Atom& a);

// True iff e is a finite sum of terms each of degree exactly one in the
// ArbJet atoms of `family`, with coefficients (and all kernel arguments and
// denominators) free of the family.  The zero expression passes.
bool is_linear_homogeneous(const Expr& e, const std::set<std::string>& family);

}  // namespace noether
