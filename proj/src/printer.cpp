#include <sstream>
#include <string>
#include <vector>

#include "noether/errors.hpp"
#include "noether/expr.hpp"

// Plain-text printing in DSL syntax, so that printing and re-parsing an
// expression is lossless.

namespace noether {

using detail::Base;
using detail::Factor;
using detail::Fn;
using detail::Fraction;
using detail::Poly;
using detail::RepPtr;
using detail::Term;

namespace {

std::string print_rep(const RepPtr& r, const std::vector<std::string>* axes);

std::string print_atom(const Atom& a, const std::vector<std::string>* axes) {
    switch (a.kind) {
        case AtomKind::Parameter:
            return a.conj_mark ? "conj(" + a.name + ")" : a.name;
        case AtomKind::Independent:
            return a.name;
        case AtomKind::Jet:
        case AtomKind::ArbJet:
            break;
    }
    const MultiIndex& J = a.index;
    if (J.mode() == IndexMode::Shift) {
        std::string s = a.name + "[";
        for (std::size_t i = 0; i < J.axes(); ++i) {
            if (i) s += ",";
            s += std::to_string(J[i]);
        }
        return s + "]";
    }
    if (J.is_zero()) return a.name;
    std::string s = a.name + "_{";
    bool first = true;
    for (std::size_t i = 0; i < J.axes(); ++i) {
        std::string axis =
            axes && i < axes->size() ? (*axes)[i] : "x" + std::to_string(i + 1);
        for (int k = 0; k < J[i]; ++k) {
            if (!first) s += " ";
            s += axis;
            first = false;
        }
    }
    return s + "}";
}

std::string print_coef(const CRat& c, bool* negated) {
    *negated = false;
    if (c.is_real()) {
        Rat r = c.re;
        if (r < 0) {
            *negated = true;
            r = -r;
        }
        return rat_str(r);
    }
    if (c.re == 0) {
        Rat im = c.im;
        std::string sign;
        if (im < 0) {
            *negated = true;
            im = -im;
        }
        if (im == 1) return "i";
        return rat_str(im) + "*i";
    }
    std::string s = "(" + rat_str(c.re);
    if (c.im > 0) {
        s += " + " + (c.im == 1 ? std::string("i") : rat_str(c.im) + "*i");
    } else {
        Rat im = -c.im;
        s += " - " + (im == 1 ? std::string("i") : rat_str(im) + "*i");
    }
    return s + ")";
}

std::string print_base_pow(const Base& b, int exp, const std::vector<std::string>* axes) {
    std::string body;
    if (b.is_atom()) {
        body = print_atom(b.atom, axes);
    } else {
        const auto& k = b.kern;
        std::string arg = print_rep(k.arg, axes);
        switch (k.fn) {
            case Fn::Ln:
                body = "ln(" + arg + ")";
                break;
            case Fn::Sin:
                body = "sin(" + arg + ")";
                break;
            case Fn::Cos:
                body = "cos(" + arg + ")";
                break;
            case Fn::Root:
                return "(" + arg + ")^(" + std::to_string(exp) + "/" +
                       std::to_string(k.root_index) + ")";
        }
    }
    if (exp == 1) return body;
    return body + "^" + std::to_string(exp);
}

std::string print_term(const Term& t, const std::vector<std::string>* axes, bool* negated) {
    std::vector<std::string> parts;
    std::string coef = print_coef(t.coef, negated);
    bool coef_is_unit = coef == "1";
    if (!coef_is_unit) parts.push_back(coef);
    for (const Factor& f : t.mono.factors) parts.push_back(print_base_pow(f.base, f.exp, axes));
    if (t.mono.earg) parts.push_back("exp(" + print_rep(t.mono.earg, axes) + ")");
    if (parts.empty()) return "1";
    std::string s = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) s += "*" + parts[i];
    return s;
}

std::string print_poly(const Poly& p, const std::vector<std::string>* axes) {
    if (p.is_zero()) return "0";
    std::string s;
    for (std::size_t i = 0; i < p.terms.size(); ++i) {
        bool neg = false;
        std::string body = print_term(p.terms[i], axes, &neg);
        if (i == 0) {
            s = neg ? "-" + body : body;
        } else {
            s += neg ? " - " + body : " + " + body;
        }
    }
    return s;
}

std::string print_rep(const RepPtr& r, const std::vector<std::string>* axes) {
    std::string num = print_poly(r->num, axes);
    if (r->den.is_constant() && !r->den.is_zero() && r->den.terms[0].coef.is_one() &&
        r->den.terms[0].mono.is_unit()) {
        return num;
    }
    std::string den = print_poly(r->den, axes);
    if (r->num.terms.size() > 1) num = "(" + num + ")";
    return num + "/(" + den + ")";
}

}  // namespace

std::string Expr::str() const { return print_rep(rep_, nullptr); }

std::string Expr::str(const std::vector<std::string>& axis_names) const {
    return print_rep(rep_, &axis_names);
}

}  // namespace noether
