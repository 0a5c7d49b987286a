#include "noether/eval.hpp"

#include <cmath>

#include "noether/errors.hpp"

namespace noether {

using detail::Factor;
using detail::Fn;
using detail::Fraction;
using detail::Poly;
using detail::RepPtr;
using detail::Term;

namespace {

using C = std::complex<long double>;

struct FloatCtx {
    const EvalPoint& point;
    long double max_term = 0;

    void note(const C& v) {
        long double m = std::abs(v);
        if (m > max_term) max_term = m;
    }
};

C eval_rep_float(const RepPtr& r, FloatCtx& ctx);

C eval_base_float(const detail::Base& b, FloatCtx& ctx) {
    if (b.is_atom()) {
        auto it = ctx.point.find(b.atom);
        if (it == ctx.point.end()) throw EngineError("unbound atom in evaluate: " + b.atom.name);
        return it->second.as_float();
    }
    const auto& k = b.kern;
    C z = eval_rep_float(k.arg, ctx);
    ctx.note(z);
    switch (k.fn) {
        case Fn::Ln:
            if (std::abs(z) < 1e-300L) throw DomainError("ln of zero");
            if (z.imag() == 0 && z.real() < 0) throw DomainError("ln of negative real");
            return std::log(z);
        case Fn::Sin:
            return std::sin(z);
        case Fn::Cos:
            return std::cos(z);
        case Fn::Root: {
            if (z.imag() == 0 && z.real() < 0 && k.root_index % 2 == 0) {
                throw DomainError("even root of negative real");
            }
            if (std::abs(z) == 0) return C(0);
            return std::pow(z, C(1.0L / static_cast<long double>(k.root_index)));
        }
    }
    throw EngineError("internal: unknown kernel");
}

C powi(C b, int e) {
    C acc(1);
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

C eval_poly_float(const Poly& p, FloatCtx& ctx) {
    C sum(0);
    for (const Term& t : p.terms) {
        C v(rat_to_ld(t.coef.re), rat_to_ld(t.coef.im));
        for (const Factor& f : t.mono.factors) v *= powi(eval_base_float(f.base, ctx), f.exp);
        if (t.mono.earg) {
            C a = eval_rep_float(t.mono.earg, ctx);
            ctx.note(a);
            v *= std::exp(a);
        }
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw DomainError("overflow during evaluation");
        }
        ctx.note(v);
        sum += v;
    }
    return sum;
}

C eval_rep_float(const RepPtr& r, FloatCtx& ctx) {
    C n = eval_poly_float(r->num, ctx);
    if (r->den.is_constant() && r->den.terms.size() == 1 && r->den.terms[0].mono.is_unit() &&
        r->den.terms[0].coef.is_one()) {
        return n;
    }
    C d = eval_poly_float(r->den, ctx);
    if (std::abs(d) == 0) throw DivisionByZero("denominator vanished at sample point");
    return n / d;
}

CRat eval_poly_exact(const Poly& p, const EvalPoint& point) {
    CRat sum(0);
    for (const Term& t : p.terms) {
        CRat v = t.coef;
        for (const Factor& f : t.mono.factors) {
            auto it = point.find(f.base.atom);
            if (it == point.end()) throw EngineError("unbound atom in evaluate: " + f.base.atom.name);
            v *= it->second.q.pow(f.exp);
        }
        sum += v;
    }
    return sum;
}

}  // namespace

EvalResult evaluate(const Expr& e, const EvalPoint& point) {
    bool exact = e.is_rational_form();
    if (exact) {
        e.for_each_atom([&](const Atom& a) {
            auto it = point.find(a);
            if (it == point.end()) throw EngineError("unbound atom in evaluate: " + a.name);
            if (!it->second.exact) exact = false;
        });
    }
    const Fraction& r = e.rep();
    if (exact) {
        CRat n = eval_poly_exact(r.num, point);
        CRat d = eval_poly_exact(r.den, point);
        if (d.is_zero()) throw DivisionByZero("denominator vanished at sample point");
        EvalResult res;
        res.value = EvalValue(n / d);
        return res;
    }
    FloatCtx ctx{point};
    C v = eval_rep_float(e.rep_ptr(), ctx);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw DomainError("overflow during evaluation");
    }
    EvalResult res;
    res.value = EvalValue(v);
    res.max_term = ctx.max_term;
    return res;
}

}  // namespace noether
