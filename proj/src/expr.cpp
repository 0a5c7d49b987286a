#include "noether/expr.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <utility>

#include "noether/errors.hpp"

namespace noether {
namespace detail {

// ---------------------------------------------------------------------------
// comparisons

int Kernel::cmp(const Kernel& other) const {
    if (fn != other.fn) return fn < other.fn ? -1 : 1;
    if (root_index != other.root_index) return root_index < other.root_index ? -1 : 1;
    return arg->cmp(*other.arg);
}

Base Base::from_atom(Atom a) {
    Base b;
    b.kernel_flag = false;
    b.atom = std::move(a);
    return b;
}

Base Base::from_kernel(Kernel k) {
    Base b;
    b.kernel_flag = true;
    b.kern = std::move(k);
    return b;
}

int Base::cmp(const Base& other) const {
    if (kernel_flag != other.kernel_flag) return kernel_flag ? 1 : -1;
    if (!kernel_flag) return atom.cmp(other.atom);
    return kern.cmp(other.kern);
}

int Monomial::degree() const {
    int d = 0;
    for (const Factor& f : factors) d += f.exp;
    return d;
}

static int cmp_rep(const RepPtr& a, const RepPtr& b) {
    if (!a && !b) return 0;
    if (!a) return -1;
    if (!b) return 1;
    return a->cmp(*b);
}

int Monomial::cmp(const Monomial& other) const {
    int da = degree();
    int db = other.degree();
    if (da != db) return da < db ? -1 : 1;
    // lex from the largest base downward (factor lists are sorted ascending)
    std::size_t i = factors.size();
    std::size_t j = other.factors.size();
    while (i > 0 && j > 0) {
        const Factor& fa = factors[i - 1];
        const Factor& fb = other.factors[j - 1];
        int c = fa.base.cmp(fb.base);
        if (c != 0) return c;
        if (fa.exp != fb.exp) return fa.exp < fb.exp ? -1 : 1;
        --i;
        --j;
    }
    if (i != j) return i < j ? -1 : 1;
    // exponential-free monomials beat exponential ones so that clearing the
    // denominator's leading exp factor keeps its leading position
    if (!earg && !other.earg) return 0;
    if (!earg) return 1;
    if (!other.earg) return -1;
    return earg->cmp(*other.earg);
}

bool Poly::is_constant() const {
    return terms.empty() || (terms.size() == 1 && terms[0].mono.is_unit());
}

Poly Poly::constant(CRat c) {
    Poly p;
    if (!c.is_zero()) p.terms.push_back(Term{std::move(c), Monomial{}});
    return p;
}

int Poly::cmp(const Poly& other) const {
    std::size_t n = std::min(terms.size(), other.terms.size());
    for (std::size_t k = 0; k < n; ++k) {
        int c = terms[k].mono.cmp(other.terms[k].mono);
        if (c != 0) return c;
        c = noether::cmp(terms[k].coef, other.terms[k].coef);
        if (c != 0) return c;
    }
    if (terms.size() != other.terms.size()) return terms.size() < other.terms.size() ? -1 : 1;
    return 0;
}

int Fraction::cmp(const Fraction& other) const {
    int c = num.cmp(other.num);
    if (c != 0) return c;
    return den.cmp(other.den);
}

// ---------------------------------------------------------------------------
// polynomial arithmetic

namespace {

RepPtr make_rep(Fraction f) { return std::make_shared<const Fraction>(std::move(f)); }

Poly poly_from_terms(std::vector<Term>&& v) {
    std::sort(v.begin(), v.end(),
              [](const Term& a, const Term& b) { return a.mono.cmp(b.mono) > 0; });
    Poly p;
    p.terms.reserve(v.size());
    for (auto& t : v) {
        if (t.coef.is_zero()) continue;
        if (!p.terms.empty() && p.terms.back().mono.cmp(t.mono) == 0) {
            p.terms.back().coef += t.coef;
            if (p.terms.back().coef.is_zero()) p.terms.pop_back();
        } else {
            p.terms.push_back(std::move(t));
        }
    }
    return p;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly r;
    r.terms.reserve(a.terms.size() + b.terms.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms.size() && j < b.terms.size()) {
        int c = a.terms[i].mono.cmp(b.terms[j].mono);
        if (c > 0) {
            r.terms.push_back(a.terms[i++]);
        } else if (c < 0) {
            r.terms.push_back(b.terms[j++]);
        } else {
            CRat s = a.terms[i].coef + b.terms[j].coef;
            if (!s.is_zero()) r.terms.push_back(Term{std::move(s), a.terms[i].mono});
            ++i;
            ++j;
        }
    }
    for (; i < a.terms.size(); ++i) r.terms.push_back(a.terms[i]);
    for (; j < b.terms.size(); ++j) r.terms.push_back(b.terms[j]);
    return r;
}

Poly poly_neg(Poly p) {
    for (auto& t : p.terms) t.coef = -t.coef;
    return p;
}

Poly poly_scale(Poly p, const CRat& c) {
    if (c.is_zero()) return Poly::zero();
    for (auto& t : p.terms) t.coef *= c;
    return p;
}

RepPtr rep_add(const RepPtr& a, const RepPtr& b);
RepPtr rep_neg(const RepPtr& a);

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.factors.reserve(a.factors.size() + b.factors.size());
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() && j < b.factors.size()) {
        int c = a.factors[i].base.cmp(b.factors[j].base);
        if (c < 0) {
            r.factors.push_back(a.factors[i++]);
        } else if (c > 0) {
            r.factors.push_back(b.factors[j++]);
        } else {
            r.factors.push_back(Factor{a.factors[i].base, a.factors[i].exp + b.factors[j].exp});
            ++i;
            ++j;
        }
    }
    for (; i < a.factors.size(); ++i) r.factors.push_back(a.factors[i]);
    for (; j < b.factors.size(); ++j) r.factors.push_back(b.factors[j]);
    if (a.earg && b.earg) {
        RepPtr s = rep_add(a.earg, b.earg);
        if (!s->num.is_zero()) r.earg = s;
    } else {
        r.earg = a.earg ? a.earg : b.earg;
    }
    return r;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly::zero();
    std::vector<Term> v;
    v.reserve(a.terms.size() * b.terms.size());
    for (const Term& ta : a.terms) {
        for (const Term& tb : b.terms) {
            v.push_back(Term{ta.coef * tb.coef, mono_mul(ta.mono, tb.mono)});
        }
    }
    return poly_from_terms(std::move(v));
}

Poly poly_pow(const Poly& p, long k) {
    Poly acc = Poly::one();
    Poly base = p;
    auto n = static_cast<unsigned long>(k);
    while (n > 0) {
        if (n & 1UL) acc = poly_mul(acc, base);
        base = poly_mul(base, base);
        n >>= 1UL;
    }
    return acc;
}

// multiply every term by exp(e)
Poly poly_mul_exp(const Poly& p, const RepPtr& e) {
    std::vector<Term> v(p.terms);
    for (auto& t : v) {
        if (t.mono.earg) {
            RepPtr s = rep_add(t.mono.earg, e);
            t.mono.earg = s->num.is_zero() ? RepPtr() : s;
        } else {
            t.mono.earg = e;
        }
    }
    return poly_from_terms(std::move(v));
}

// ---------------------------------------------------------------------------
// gcd machinery (formal polynomial ring; exp parts are stripped first)

bool mono_divides(const Monomial& a, const Monomial& b, Monomial* quot) {
    // b / a, exponential parts subtract freely
    Monomial q;
    std::size_t i = 0;
    for (const Factor& fb : b.factors) {
        while (i < a.factors.size() && a.factors[i].base.cmp(fb.base) < 0) return false;
        if (i < a.factors.size() && a.factors[i].base.cmp(fb.base) == 0) {
            if (a.factors[i].exp > fb.exp) return false;
            if (a.factors[i].exp < fb.exp) q.factors.push_back(Factor{fb.base, fb.exp - a.factors[i].exp});
            ++i;
        } else {
            q.factors.push_back(fb);
        }
    }
    if (i != a.factors.size()) return false;
    if (a.earg || b.earg) {
        RepPtr d = a.earg ? (b.earg ? rep_add(b.earg, rep_neg(a.earg)) : rep_neg(a.earg))
                          : b.earg;
        if (d && !d->num.is_zero()) q.earg = d;
    }
    *quot = std::move(q);
    return true;
}

std::optional<Poly> poly_try_divide(const Poly& a, const Poly& b) {
    if (b.is_zero()) return std::nullopt;
    Poly rem = a;
    std::vector<Term> quot;
    while (!rem.is_zero()) {
        Monomial qm;
        if (!mono_divides(b.terms[0].mono, rem.terms[0].mono, &qm)) return std::nullopt;
        CRat qc = rem.terms[0].coef / b.terms[0].coef;
        Term t{qc, qm};
        Poly prod = poly_mul(Poly{{t}}, b);
        rem = poly_add(rem, poly_neg(prod));
        quot.push_back(std::move(t));
    }
    return poly_from_terms(std::move(quot));
}

Poly poly_exact_divide(const Poly& a, const Poly& b) {
    auto q = poly_try_divide(a, b);
    if (!q) throw EngineError("internal: inexact polynomial division");
    return *q;
}

Poly make_monic(Poly p) {
    if (p.is_zero()) return p;
    CRat lead = p.terms[0].coef;
    if (lead.is_one()) return p;
    return poly_scale(std::move(p), CRat(1) / lead);
}

int deg_in(const Poly& p, const Base& x) {
    int d = 0;
    for (const Term& t : p.terms) {
        for (const Factor& f : t.mono.factors) {
            if (f.base.cmp(x) == 0) d = std::max(d, f.exp);
        }
    }
    return d;
}

// coefficient of x^k in p, as a polynomial free of x
Poly coeff_of(const Poly& p, const Base& x, int k) {
    std::vector<Term> v;
    for (const Term& t : p.terms) {
        int e = 0;
        Monomial rest;
        for (const Factor& f : t.mono.factors) {
            if (f.base.cmp(x) == 0) {
                e = f.exp;
            } else {
                rest.factors.push_back(f);
            }
        }
        rest.earg = t.mono.earg;
        if (e == k) v.push_back(Term{t.coef, std::move(rest)});
    }
    return poly_from_terms(std::move(v));
}

Poly mono_power_poly(const Base& x, int k) {
    if (k == 0) return Poly::one();
    Monomial m;
    m.factors.push_back(Factor{x, k});
    return Poly{{Term{CRat(1), m}}};
}

const Base* highest_base(const Poly& a, const Poly& b) {
    const Base* best = nullptr;
    auto scan = [&best](const Poly& p) {
        for (const Term& t : p.terms) {
            for (const Factor& f : t.mono.factors) {
                if (!best || f.base.cmp(*best) > 0) best = &f.base;
            }
        }
    };
    scan(a);
    scan(b);
    return best;
}

Poly gcd_exp_free(const Poly& a, const Poly& b);

// gcd of the x-coefficients of p
Poly content_wrt(const Poly& p, const Base& x) {
    int d = deg_in(p, x);
    Poly g = Poly::zero();
    for (int k = 0; k <= d; ++k) {
        Poly c = coeff_of(p, x, k);
        if (c.is_zero()) continue;
        g = gcd_exp_free(g, c);
        if (g.is_constant() && !g.is_zero()) return Poly::one();
    }
    return g;
}

Poly pseudo_rem(const Poly& a, const Poly& b, const Base& x) {
    int db = deg_in(b, x);
    Poly lb = coeff_of(b, x, db);
    Poly r = a;
    while (!r.is_zero()) {
        int dr = deg_in(r, x);
        if (dr < db) break;
        Poly lr = coeff_of(r, x, dr);
        // lb*r - lr*x^(dr-db)*b  kills the top term in x
        Poly t = poly_mul(poly_mul(lr, mono_power_poly(x, dr - db)), b);
        r = poly_add(poly_mul(lb, r), poly_neg(t));
    }
    return r;
}

Poly primitive_part(const Poly& p, const Base& x) {
    if (p.is_zero()) return p;
    Poly c = content_wrt(p, x);
    if (c.is_constant()) return make_monic(p);
    return make_monic(poly_exact_divide(p, make_monic(c)));
}

Poly gcd_exp_free(const Poly& a, const Poly& b) {
    if (a.is_zero()) return make_monic(b);
    if (b.is_zero()) return make_monic(a);
    if (a.is_constant() || b.is_constant()) return Poly::one();
    const Base* main = highest_base(a, b);
    if (!main) return Poly::one();
    Base x = *main;
    Poly ca = content_wrt(a, x);
    Poly cb = content_wrt(b, x);
    Poly c = gcd_exp_free(ca, cb);
    Poly u = primitive_part(a, x);
    Poly v = primitive_part(b, x);
    if (deg_in(u, x) < deg_in(v, x)) std::swap(u, v);
    while (!v.is_zero()) {
        if (deg_in(v, x) == 0) {
            u = Poly::one();
            break;
        }
        Poly r = pseudo_rem(u, v, x);
        u = v;
        v = r.is_zero() ? Poly::zero() : primitive_part(r, x);
    }
    if (u.is_constant()) u = Poly::one();
    return make_monic(poly_mul(c, u));
}

// exp-free components of p: the sum is regrouped by exponential argument and
// each group's argument is stripped.  A polynomial divides p iff it divides
// every component.
std::vector<Poly> exp_components(const Poly& p) {
    std::vector<std::pair<RepPtr, std::vector<Term>>> groups;
    for (const Term& t : p.terms) {
        auto it = std::find_if(groups.begin(), groups.end(), [&t](const auto& g) {
            return cmp_rep(g.first, t.mono.earg) == 0;
        });
        if (it == groups.end()) {
            groups.push_back({t.mono.earg, {}});
            it = groups.end() - 1;
        }
        Term s = t;
        s.mono.earg = nullptr;
        it->second.push_back(std::move(s));
    }
    std::vector<Poly> out;
    out.reserve(groups.size());
    for (auto& g : groups) out.push_back(poly_from_terms(std::move(g.second)));
    return out;
}

// largest monomial dividing every term of p (exponential parts are units here)
Monomial monomial_content(const Poly& p) {
    Monomial g = p.terms[0].mono;
    g.earg = nullptr;
    for (std::size_t t = 1; t < p.terms.size() && !g.factors.empty(); ++t) {
        const Monomial& m = p.terms[t].mono;
        std::vector<Factor> next;
        std::size_t j = 0;
        for (const Factor& f : g.factors) {
            while (j < m.factors.size() && m.factors[j].base.cmp(f.base) < 0) ++j;
            if (j < m.factors.size() && m.factors[j].base.cmp(f.base) == 0) {
                next.push_back(Factor{f.base, std::min(f.exp, m.factors[j].exp)});
            }
        }
        g.factors = std::move(next);
    }
    return g;
}

Poly poly_gcd(const Poly& a, const Poly& b) {
    // split off the common monomial factor first: cheap, and it fully
    // handles the ubiquitous single-term denominators
    Monomial ma = monomial_content(a);
    Monomial mb = monomial_content(b);
    Monomial gm;
    {
        std::size_t j = 0;
        for (const Factor& f : ma.factors) {
            while (j < mb.factors.size() && mb.factors[j].base.cmp(f.base) < 0) ++j;
            if (j < mb.factors.size() && mb.factors[j].base.cmp(f.base) == 0) {
                gm.factors.push_back(Factor{f.base, std::min(f.exp, mb.factors[j].exp)});
            }
        }
    }
    Poly gmono{{Term{CRat(1), gm}}};
    if (a.terms.size() == 1 || b.terms.size() == 1) return gmono;
    Poly a1 = gm.factors.empty() ? a : poly_exact_divide(a, gmono);
    Poly b1 = gm.factors.empty() ? b : poly_exact_divide(b, gmono);
    Poly g = Poly::zero();
    for (const Poly& c : exp_components(a1)) {
        g = gcd_exp_free(g, c);
        if (g.is_constant() && !g.is_zero()) return gmono;
    }
    for (const Poly& c : exp_components(b1)) {
        g = gcd_exp_free(g, c);
        if (g.is_constant() && !g.is_zero()) return gmono;
    }
    return poly_mul(gmono, g);
}

// ---------------------------------------------------------------------------
// coprimality certificate and square-free ladder
//
// The full primitive-PRS gcd is expensive on large numerators.  Two standard
// shortcuts keep reduction cheap in the common cases:
//  * a sound evaluation certificate for gcd == 1: for every base x, evaluate
//    all other bases at random integers; if the leading x-coefficients
//    survive the evaluation, deg_x gcd(A,B) <= deg_x gcd(A|eval, B|eval), so
//    constant univariate gcds for every x prove the gcd constant;
//  * repeated denominator factors (powers of a Jacobian and the like) are
//    peeled by trial division with the denominator's square-free part.

std::vector<Base> base_union(const Poly& a, const Poly& b) {
    std::vector<Base> out;
    auto scan = [&out](const Poly& p) {
        for (const Term& t : p.terms) {
            for (const Factor& f : t.mono.factors) {
                bool found = false;
                for (const Base& q : out) {
                    if (q.cmp(f.base) == 0) {
                        found = true;
                        break;
                    }
                }
                if (!found) out.push_back(f.base);
            }
        }
    };
    scan(a);
    scan(b);
    return out;
}

// univariate gcd over Q(i), coefficients indexed by degree
int uni_gcd_degree(std::vector<CRat> a, std::vector<CRat> b) {
    auto deg = [](const std::vector<CRat>& p) {
        int d = static_cast<int>(p.size()) - 1;
        while (d >= 0 && p[static_cast<std::size_t>(d)].is_zero()) --d;
        return d;
    };
    int da = deg(a), db = deg(b);
    if (da < 0) return db;
    if (db < 0) return da;
    while (db >= 0) {
        if (db == 0) return 0;
        // a mod b
        for (int k = da; k >= db; --k) {
            CRat q = a[static_cast<std::size_t>(k)] / b[static_cast<std::size_t>(db)];
            if (q.is_zero()) continue;
            for (int j = 0; j <= db; ++j) {
                a[static_cast<std::size_t>(k - db + j)] =
                    a[static_cast<std::size_t>(k - db + j)] - q * b[static_cast<std::size_t>(j)];
            }
        }
        std::swap(a, b);
        da = db;
        db = deg(b);
    }
    return da;
}

// evaluate the x-coefficient vector of p with every other base replaced by
// the sample value attached to it
std::vector<CRat> eval_coeff_vector(const Poly& p, const Base& x, int degx,
                                    const std::vector<std::pair<Base, CRat>>& samples) {
    std::vector<CRat> out(static_cast<std::size_t>(degx) + 1, CRat(0));
    for (const Term& t : p.terms) {
        CRat v = t.coef;
        int e = 0;
        for (const Factor& f : t.mono.factors) {
            if (f.base.cmp(x) == 0) {
                e = f.exp;
                continue;
            }
            for (const auto& [b, val] : samples) {
                if (b.cmp(f.base) == 0) {
                    v *= val.pow(f.exp);
                    break;
                }
            }
        }
        out[static_cast<std::size_t>(e)] += v;
    }
    return out;
}

bool certified_coprime(const Poly& a, const Poly& b) {
    std::vector<Base> bases = base_union(a, b);
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL + a.terms.size() * 131 + b.terms.size());
    for (const Base& x : bases) {
        int da = deg_in(a, x);
        int db = deg_in(b, x);
        if (da == 0 || db == 0) continue;  // gcd is free of x already
        bool proved = false;
        for (int attempt = 0; attempt < 4 && !proved; ++attempt) {
            std::vector<std::pair<Base, CRat>> samples;
            for (const Base& y : bases) {
                if (y.cmp(x) == 0) continue;
                samples.emplace_back(y, CRat(Rat(static_cast<long>(rng() % 211) + 2)));
            }
            std::vector<CRat> ua = eval_coeff_vector(a, x, da, samples);
            std::vector<CRat> ub = eval_coeff_vector(b, x, db, samples);
            if (ua[static_cast<std::size_t>(da)].is_zero() ||
                ub[static_cast<std::size_t>(db)].is_zero()) {
                continue;  // leading coefficient vanished; resample
            }
            if (uni_gcd_degree(std::move(ua), std::move(ub)) == 0) proved = true;
        }
        if (!proved) return false;
    }
    return true;
}

Poly poly_formal_derivative(const Poly& p, const Base& x) {
    std::vector<Term> v;
    for (const Term& t : p.terms) {
        for (std::size_t k = 0; k < t.mono.factors.size(); ++k) {
            if (t.mono.factors[k].base.cmp(x) != 0) continue;
            Term s = t;
            s.coef *= CRat(Rat(static_cast<long>(t.mono.factors[k].exp)));
            if (s.mono.factors[k].exp == 1) {
                s.mono.factors.erase(s.mono.factors.begin() + static_cast<long>(k));
            } else {
                s.mono.factors[k].exp -= 1;
            }
            v.push_back(std::move(s));
        }
    }
    return poly_from_terms(std::move(v));
}

// den / gcd(den, d den): the product of den's distinct prime factors
Poly square_free_part(const Poly& den) {
    const Base* main = highest_base(den, Poly::zero());
    if (!main) return Poly::one();
    Poly d = poly_formal_derivative(den, *main);
    if (d.is_zero()) return Poly::one();
    Poly g = gcd_exp_free(den, d);
    if (g.is_constant()) return den;
    auto q = poly_try_divide(den, g);
    return q ? *q : den;
}

// gcd-reduce num/den with the fast paths first, full PRS as a last resort
void reduce_fraction(Poly& num, Poly& den) {
    // common monomial factor
    Monomial mnum = monomial_content(num);
    Monomial mden = monomial_content(den);
    Monomial gm;
    {
        std::size_t j = 0;
        for (const Factor& f : mnum.factors) {
            while (j < mden.factors.size() && mden.factors[j].base.cmp(f.base) < 0) ++j;
            if (j < mden.factors.size() && mden.factors[j].base.cmp(f.base) == 0) {
                gm.factors.push_back(Factor{f.base, std::min(f.exp, mden.factors[j].exp)});
            }
        }
    }
    if (!gm.factors.empty()) {
        Poly gmono{{Term{CRat(1), gm}}};
        num = poly_exact_divide(num, gmono);
        den = poly_exact_divide(den, gmono);
    }
    if (num.is_constant() || den.is_constant()) return;
    if (num.terms.size() == 1 || den.terms.size() == 1) return;  // monomial split was complete

    std::vector<Poly> ncomp = exp_components(num);
    auto divides_all = [](const std::vector<Poly>& comps, const Poly& s) {
        for (const Poly& c : comps) {
            if (!poly_try_divide(c, s)) return false;
        }
        return true;
    };

    for (int round = 0; round < 64; ++round) {
        // a common divisor of num and den divides every exp-free component,
        // so component-wise coprimality certifies the pair
        bool coprime = true;
        for (const Poly& c : ncomp) {
            if (!certified_coprime(c, den)) {
                coprime = false;
                break;
            }
        }
        if (coprime) return;

        Poly s = square_free_part(den);
        if (!s.is_constant() && divides_all(ncomp, s)) {
            if (auto dq = poly_try_divide(den, s)) {
                std::vector<Poly> next;
                for (const Poly& c : ncomp) next.push_back(*poly_try_divide(c, s));
                num = poly_exact_divide(num, s);
                den = *dq;
                ncomp = std::move(next);
                if (den.is_constant() || num.is_constant()) return;
                continue;
            }
        }
        break;  // no cheap progress; use the full machinery
    }

    Poly g = poly_gcd(num, den);
    if (!g.is_zero() && !g.is_constant()) {
        num = poly_exact_divide(num, g);
        den = poly_exact_divide(den, g);
    }
}

// ---------------------------------------------------------------------------
// fraction normalization

Fraction make_fraction(Poly num, Poly den, bool run_gcd = true) {
    if (den.is_zero()) throw DivisionByZero();
    if (num.is_zero()) return Fraction{Poly::zero(), Poly::one()};
    if (den.terms[0].mono.earg) {
        RepPtr e0 = rep_neg(den.terms[0].mono.earg);
        num = poly_mul_exp(num, e0);
        den = poly_mul_exp(den, e0);
    }
    if (run_gcd && !den.is_constant() && !num.is_constant()) {
        reduce_fraction(num, den);
    }
    CRat lead = den.terms[0].coef;
    if (!lead.is_one()) {
        CRat inv = CRat(1) / lead;
        num = poly_scale(std::move(num), inv);
        den = poly_scale(std::move(den), inv);
    }
    return Fraction{std::move(num), std::move(den)};
}

RepPtr rep_add(const RepPtr& a, const RepPtr& b) {
    if (a->den.cmp(b->den) == 0) {
        return make_rep(make_fraction(poly_add(a->num, b->num), a->den));
    }
    Poly n = poly_add(poly_mul(a->num, b->den), poly_mul(b->num, a->den));
    Poly d = poly_mul(a->den, b->den);
    return make_rep(make_fraction(std::move(n), std::move(d)));
}

RepPtr rep_neg(const RepPtr& a) {
    return make_rep(Fraction{poly_neg(a->num), a->den});
}

}  // namespace
}  // namespace detail

// ---------------------------------------------------------------------------
// Expr public interface

using detail::Base;
using detail::Factor;
using detail::Fn;
using detail::Fraction;
using detail::Kernel;
using detail::make_rep;
using detail::Monomial;
using detail::Poly;
using detail::RepPtr;
using detail::Term;

namespace {

const RepPtr& zero_rep() {
    static const RepPtr r = make_rep(Fraction{Poly::zero(), Poly::one()});
    return r;
}

const RepPtr& one_rep() {
    static const RepPtr r = make_rep(Fraction{Poly::one(), Poly::one()});
    return r;
}

RepPtr constant_rep(CRat c) {
    return make_rep(Fraction{Poly::constant(std::move(c)), Poly::one()});
}

RepPtr base_rep(Base b, int exp = 1) {
    Monomial m;
    m.factors.push_back(Factor{std::move(b), exp});
    return make_rep(Fraction{Poly{{Term{CRat(1), std::move(m)}}}, Poly::one()});
}

}  // namespace

Expr::Expr() : rep_(zero_rep()) {}

Expr::Expr(long long v) : rep_(v == 0 ? zero_rep() : constant_rep(CRat(Rat(static_cast<long>(v))))) {}

Expr::Expr(const Rat& r) : rep_(constant_rep(CRat(r))) {}

Expr::Expr(const CRat& c) : rep_(constant_rep(c)) {}

Expr Expr::imaginary() { return Expr(CRat::imaginary()); }

Expr Expr::atom(Atom a) { return from_rep(base_rep(Base::from_atom(std::move(a)))); }

Expr Expr::from_rep(detail::RepPtr rep) {
    Expr e;
    e.rep_ = std::move(rep);
    return e;
}

bool Expr::is_zero() const { return rep_->num.is_zero(); }

bool Expr::is_one() const {
    return rep_->den.is_constant() && rep_->num.is_constant() && !rep_->num.is_zero() &&
           rep_->num.terms[0].coef.is_one() && rep_->num.terms[0].mono.is_unit() &&
           rep_->den.terms[0].coef.is_one();
}

std::optional<CRat> Expr::constant_value() const {
    if (rep_->num.is_zero()) {
        return CRat(0);
    }
    if (rep_->num.is_constant() && rep_->den.is_constant() &&
        rep_->num.terms[0].mono.is_unit() && rep_->den.terms[0].mono.is_unit()) {
        return rep_->num.terms[0].coef / rep_->den.terms[0].coef;
    }
    return std::nullopt;
}

namespace {

bool poly_rational_form(const Poly& p) {
    for (const Term& t : p.terms) {
        if (t.mono.earg) return false;
        for (const Factor& f : t.mono.factors) {
            if (f.base.kernel_flag) return false;
        }
    }
    return true;
}

}  // namespace

bool Expr::is_rational_form() const {
    return poly_rational_form(rep_->num) && poly_rational_form(rep_->den);
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return Expr::from_rep(detail::rep_add(a.rep_, b.rep_));
}

Expr Expr::operator-() const {
    if (is_zero()) return *this;
    return from_rep(detail::rep_neg(rep_));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

namespace {

bool fraction_single_terms(const Fraction& f) {
    return f.num.terms.size() == 1 && f.den.terms.size() == 1;
}

bool fraction_has_root(const Fraction& f);

// product of two monomial-over-monomial fractions, accumulating rational
// exponents so that q-th roots collapse when they complete
Expr mul_single_term_fractions(const Fraction& a, const Fraction& b);

Expr mul_general(const Expr& a, const Expr& b) {
    Poly n = detail::poly_mul(a.rep().num, b.rep().num);
    Poly d = detail::poly_mul(a.rep().den, b.rep().den);
    return Expr::from_rep(make_rep(detail::make_fraction(std::move(n), std::move(d))));
}

}  // namespace

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr();
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    if (fraction_single_terms(*a.rep_) && fraction_single_terms(*b.rep_) &&
        (fraction_has_root(*a.rep_) || fraction_has_root(*b.rep_))) {
        return mul_single_term_fractions(*a.rep_, *b.rep_);
    }
    return mul_general(a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw DivisionByZero();
    if (a.is_zero()) return a;
    Poly n = detail::poly_mul(a.rep_->num, b.rep_->den);
    Poly d = detail::poly_mul(a.rep_->den, b.rep_->num);
    return Expr::from_rep(make_rep(detail::make_fraction(std::move(n), std::move(d))));
}

namespace {

bool poly_has_root_kernel(const Poly& p) {
    for (const Term& t : p.terms) {
        for (const Factor& f : t.mono.factors) {
            if (f.base.kernel_flag && f.base.kern.fn == Fn::Root) return true;
        }
    }
    return false;
}

// (c * prod b_i^{e_i} * exp(E))^k with exact collapse of root kernels
Expr pow_single_term(const Term& t, long k) {
    Expr acc{t.coef.pow(k)};
    for (const Factor& f : t.mono.factors) {
        long total = static_cast<long>(f.exp) * k;
        if (f.base.kernel_flag && f.base.kern.fn == Fn::Root) {
            acc = acc * pow(Expr::from_rep(f.base.kern.arg),
                            Rat(total, static_cast<long>(f.base.kern.root_index)));
        } else {
            acc = acc * pow(Expr::from_rep(base_rep(f.base)), total);
        }
    }
    if (t.mono.earg) acc = acc * exp(Expr(Rat(k)) * Expr::from_rep(t.mono.earg));
    return acc;
}

}  // namespace

Expr pow(const Expr& e, long k) {
    if (k == 0) return Expr(1);
    if (k == 1) return e;
    if (e.is_zero()) {
        if (k < 0) throw DivisionByZero();
        return e;
    }
    // single-term fractions with root kernels distribute exactly, collapsing
    // q-th powers of q-th roots back to the radicand
    if (e.rep_->num.terms.size() == 1 && e.rep_->den.terms.size() == 1 &&
        (poly_has_root_kernel(e.rep_->num) || poly_has_root_kernel(e.rep_->den))) {
        return pow_single_term(e.rep_->num.terms[0], k) /
               pow_single_term(e.rep_->den.terms[0], k);
    }
    long a = k > 0 ? k : -k;
    Poly n = detail::poly_pow(e.rep_->num, a);
    Poly d = detail::poly_pow(e.rep_->den, a);
    if (k < 0) std::swap(n, d);
    // coprimality survives powers; skip the gcd pass
    return Expr::from_rep(make_rep(detail::make_fraction(std::move(n), std::move(d), false)));
}

namespace {

bool fraction_has_root(const Fraction& f) {
    return poly_has_root_kernel(f.num) || poly_has_root_kernel(f.den);
}

Expr mul_single_term_fractions(const Fraction& a, const Fraction& b) {
    CRat coef(1);
    std::map<Expr, Rat> exps;
    Expr earg_sum;
    auto accumulate = [&](const Term& t, int sign) {
        coef = sign > 0 ? coef * t.coef : coef / t.coef;
        for (const Factor& f : t.mono.factors) {
            Expr key;
            Rat e;
            if (f.base.kernel_flag && f.base.kern.fn == Fn::Root) {
                key = Expr::from_rep(f.base.kern.arg);
                e = Rat(sign * static_cast<long>(f.exp),
                        static_cast<long>(f.base.kern.root_index));
            } else {
                key = Expr::from_rep(base_rep(f.base));
                e = Rat(sign * static_cast<long>(f.exp));
            }
            exps[key] += e;
        }
        if (t.mono.earg) {
            Expr arg = Expr::from_rep(t.mono.earg);
            earg_sum += sign > 0 ? arg : -arg;
        }
    };
    accumulate(a.num.terms[0], 1);
    accumulate(a.den.terms[0], -1);
    accumulate(b.num.terms[0], 1);
    accumulate(b.den.terms[0], -1);
    // assemble through the general path: the keys are pairwise distinct, so
    // no exponent recombination (and no re-entry into this function) happens
    Expr acc{coef};
    for (const auto& [key, e] : exps) {
        if (e != 0) acc = mul_general(acc, pow(key, e));
    }
    if (!earg_sum.is_zero()) acc = mul_general(acc, exp(earg_sum));
    return acc;
}

}  // namespace

Expr pow(const Expr& e, const Rat& r) {
    if (r.get_den() == 1) {
        return pow(e, r.get_num().get_si());
    }
    long q = r.get_den().get_si();
    long p = r.get_num().get_si();
    long s = p / q;
    long rem = p % q;
    if (rem < 0) {
        rem += q;
        s -= 1;
    }
    // e^(p/q) = e^s * (e^(1/q))^rem with 0 <= rem < q
    if (e.is_zero()) {
        if (p < 0) throw DivisionByZero();
        return e;
    }
    Expr head = pow(e, s);
    if (rem == 0) return head;
    if (e.is_one()) return head;
    Kernel k;
    k.fn = Fn::Root;
    k.arg = e.rep_ptr();
    k.root_index = static_cast<unsigned>(q);
    // assemble directly: e^s * root(e)^rem is already the canonical shape
    return mul_general(head,
                       Expr::from_rep(base_rep(Base::from_kernel(std::move(k)),
                                               static_cast<int>(rem))));
}

Expr exp(const Expr& e) {
    if (e.is_zero()) return Expr(1);
    Monomial m;
    m.earg = e.rep_ptr();
    return Expr::from_rep(make_rep(Fraction{Poly{{Term{CRat(1), std::move(m)}}}, Poly::one()}));
}

Expr ln(const Expr& e) {
    if (e.is_zero()) throw DomainError("ln(0)");
    if (e.is_one()) return Expr();
    Kernel k;
    k.fn = Fn::Ln;
    k.arg = e.rep_ptr();
    return Expr::from_rep(base_rep(Base::from_kernel(std::move(k))));
}

Expr sin(const Expr& e) {
    if (e.is_zero()) return Expr();
    Kernel k;
    k.fn = Fn::Sin;
    k.arg = e.rep_ptr();
    return Expr::from_rep(base_rep(Base::from_kernel(std::move(k))));
}

Expr cos(const Expr& e) {
    if (e.is_zero()) return Expr(1);
    Kernel k;
    k.fn = Fn::Cos;
    k.arg = e.rep_ptr();
    return Expr::from_rep(base_rep(Base::from_kernel(std::move(k))));
}

// ---------------------------------------------------------------------------
// structural walks

namespace {

void walk_poly_atoms(const Poly& p, const std::function<void(const Atom&)>& f);

void walk_rep_atoms(const RepPtr& r, const std::function<void(const Atom&)>& f) {
    if (!r) return;
    walk_poly_atoms(r->num, f);
    walk_poly_atoms(r->den, f);
}

void walk_poly_atoms(const Poly& p, const std::function<void(const Atom&)>& f) {
    for (const Term& t : p.terms) {
        for (const Factor& fac : t.mono.factors) {
            if (fac.base.is_atom()) {
                f(fac.base.atom);
            } else {
                walk_rep_atoms(fac.base.kern.arg, f);
            }
        }
        walk_rep_atoms(t.mono.earg, f);
    }
}

}  // namespace

void Expr::for_each_atom(const std::function<void(const Atom&)>& f) const {
    walk_rep_atoms(rep_, f);
}

std::set<Atom> Expr::atoms() const {
    std::set<Atom> s;
    for_each_atom([&s](const Atom& a) { s.insert(a); });
    return s;
}

bool Expr::depends_on(const Atom& a) const {
    bool found = false;
    for_each_atom([&](const Atom& x) {
        if (x == a) found = true;
    });
    return found;
}

bool Expr::depends_on_name(AtomKind kind, const std::string& name) const {
    bool found = false;
    for_each_atom([&](const Atom& x) {
        if (x.kind == kind && x.name == name) found = true;
    });
    return found;
}

int Expr::compare(const Expr& a, const Expr& b) {
    if (a.rep_ == b.rep_) return 0;
    return a.rep_->cmp(*b.rep_);
}

// ---------------------------------------------------------------------------
// substitution / differentiation / conjugation

namespace {

// balanced summation keeps intermediate polynomials small
Expr sum_exprs(std::vector<Expr>&& v) {
    if (v.empty()) return Expr();
    while (v.size() > 1) {
        std::vector<Expr> next;
        next.reserve(v.size() / 2 + 1);
        for (std::size_t i = 0; i + 1 < v.size(); i += 2) next.push_back(v[i] + v[i + 1]);
        if (v.size() % 2 == 1) next.push_back(v.back());
        v = std::move(next);
    }
    return v[0];
}

Expr kernel_to_expr(const Kernel& k) {
    return Expr::from_rep(base_rep(Base::from_kernel(k)));
}

Expr rebuild_kernel(const Kernel& k, const Expr& arg) {
    switch (k.fn) {
        case Fn::Ln:
            return ln(arg);
        case Fn::Sin:
            return sin(arg);
        case Fn::Cos:
            return cos(arg);
        case Fn::Root:
            return pow(arg, Rat(1, static_cast<long>(k.root_index)));
    }
    throw EngineError("internal: unknown kernel");
}

Expr subst_rep(const RepPtr& r, const std::map<Atom, Expr>& bindings);

Expr subst_poly(const Poly& p, const std::map<Atom, Expr>& bindings) {
    std::vector<Expr> parts;
    parts.reserve(p.terms.size());
    for (const Term& t : p.terms) {
        Expr e{t.coef};
        for (const Factor& f : t.mono.factors) {
            Expr b;
            if (f.base.is_atom()) {
                auto it = bindings.find(f.base.atom);
                b = it != bindings.end() ? it->second : Expr::atom(f.base.atom);
            } else {
                b = rebuild_kernel(f.base.kern, subst_rep(f.base.kern.arg, bindings));
            }
            e *= pow(b, static_cast<long>(f.exp));
        }
        if (t.mono.earg) e *= exp(subst_rep(t.mono.earg, bindings));
        parts.push_back(std::move(e));
    }
    return sum_exprs(std::move(parts));
}

Expr subst_rep(const RepPtr& r, const std::map<Atom, Expr>& bindings) {
    Expr n = subst_poly(r->num, bindings);
    if (r->den.is_constant() && r->den.terms.size() == 1 && r->den.terms[0].mono.is_unit() &&
        r->den.terms[0].coef.is_one()) {
        return n;
    }
    return n / subst_poly(r->den, bindings);
}

}  // namespace

Expr Expr::substituted(const std::map<Atom, Expr>& bindings) const {
    if (bindings.empty()) return *this;
    bool touched = false;
    for_each_atom([&](const Atom& a) {
        if (bindings.count(a)) touched = true;
    });
    if (!touched) return *this;
    return subst_rep(rep_, bindings);
}

namespace {

Expr diff_rep(const RepPtr& r, const Atom& a);

// single term of p with factor k's exponent reduced by one; coefficient
// multiplied by the old exponent (power-rule bookkeeping)
Expr term_with_reduced_factor(const Term& t, std::size_t k) {
    Term s = t;
    s.coef *= CRat(Rat(static_cast<long>(t.mono.factors[k].exp)));
    if (s.mono.factors[k].exp == 1) {
        s.mono.factors.erase(s.mono.factors.begin() + static_cast<long>(k));
    } else {
        s.mono.factors[k].exp -= 1;
    }
    return Expr::from_rep(make_rep(Fraction{Poly{{s}}, Poly::one()}));
}

Expr base_derivative(const Base& b, const Atom& a) {
    if (b.is_atom()) return b.atom == a ? Expr(1) : Expr();
    const Kernel& k = b.kern;
    Expr darg = diff_rep(k.arg, a);
    if (darg.is_zero()) return Expr();
    Expr arg = Expr::from_rep(k.arg);
    switch (k.fn) {
        case Fn::Ln:
            return darg / arg;
        case Fn::Sin:
            return cos(arg) * darg;
        case Fn::Cos:
            return -(sin(arg) * darg);
        case Fn::Root:
            // d(arg^(1/q)) = (1/q) * arg^(1/q) * darg / arg
            return Expr(Rat(1, static_cast<long>(k.root_index))) * kernel_to_expr(k) * darg / arg;
    }
    throw EngineError("internal: unknown kernel");
}

Expr diff_poly(const Poly& p, const Atom& a) {
    std::vector<Expr> parts;
    for (const Term& t : p.terms) {
        for (std::size_t k = 0; k < t.mono.factors.size(); ++k) {
            Expr db = base_derivative(t.mono.factors[k].base, a);
            if (db.is_zero()) continue;
            parts.push_back(term_with_reduced_factor(t, k) * db);
        }
        if (t.mono.earg) {
            Expr de = diff_rep(t.mono.earg, a);
            if (!de.is_zero()) {
                parts.push_back(Expr::from_rep(make_rep(Fraction{Poly{{t}}, Poly::one()})) * de);
            }
        }
    }
    return sum_exprs(std::move(parts));
}

Expr diff_rep(const RepPtr& r, const Atom& a) {
    Expr dn = diff_poly(r->num, a);
    bool den_trivial = r->den.is_constant();
    Expr dd = den_trivial ? Expr() : diff_poly(r->den, a);
    if (den_trivial) {
        if (r->den.terms[0].coef.is_one()) return dn;
        return dn / Expr(r->den.terms[0].coef);
    }
    Expr num = Expr::from_rep(make_rep(Fraction{r->num, Poly::one()}));
    Expr den = Expr::from_rep(make_rep(Fraction{r->den, Poly::one()}));
    if (dd.is_zero()) return dn / den;
    return (dn * den - num * dd) / (den * den);
}

}  // namespace

Expr Expr::diff(const Atom& a) const {
    if (!depends_on(a)) return Expr();
    return diff_rep(rep_, a);
}

namespace {

Expr conj_rep(const RepPtr& r, const std::map<std::string, std::string>& pairs);

Expr conj_poly(const Poly& p, const std::map<std::string, std::string>& pairs) {
    std::vector<Expr> parts;
    parts.reserve(p.terms.size());
    for (const Term& t : p.terms) {
        Expr e{t.coef.conj()};
        for (const Factor& f : t.mono.factors) {
            Expr b;
            if (f.base.is_atom()) {
                Atom a = f.base.atom;
                if (a.kind == AtomKind::Jet) {
                    auto it = pairs.find(a.name);
                    if (it != pairs.end()) a.name = it->second;
                } else if (a.kind == AtomKind::Parameter && !a.is_real) {
                    a.conj_mark = !a.conj_mark;
                }
                b = Expr::atom(std::move(a));
            } else {
                b = rebuild_kernel(f.base.kern, conj_rep(f.base.kern.arg, pairs));
            }
            e *= pow(b, static_cast<long>(f.exp));
        }
        if (t.mono.earg) e *= exp(conj_rep(t.mono.earg, pairs));
        parts.push_back(std::move(e));
    }
    return sum_exprs(std::move(parts));
}

Expr conj_rep(const RepPtr& r, const std::map<std::string, std::string>& pairs) {
    Expr n = conj_poly(r->num, pairs);
    if (r->den.is_constant() && r->den.terms[0].coef.is_one() &&
        r->den.terms[0].mono.is_unit()) {
        return n;
    }
    return n / conj_poly(r->den, pairs);
}

}  // namespace

Expr Expr::conjugated(const std::map<std::string, std::string>& pairs) const {
    return conj_rep(rep_, pairs);
}

// ---------------------------------------------------------------------------
// free-function forms of the kernel operations

Expr substitute(const Expr& e, const std::map<Atom, Expr>& bindings) {
    return e.substituted(bindings);
}

Expr partial_wrt(const Expr& e, const Atom& a) {
    if (!a.is_jet_like()) throw EngineError("partial_wrt expects a Jet or ArbJet atom");
    return e.diff(a);
}

namespace {

bool rep_mentions_family(const RepPtr& r, const std::set<std::string>& family);

bool poly_mentions_family(const Poly& p, const std::set<std::string>& family) {
    for (const Term& t : p.terms) {
        for (const Factor& f : t.mono.factors) {
            if (f.base.is_atom()) {
                const Atom& a = f.base.atom;
                if (a.kind == AtomKind::ArbJet && family.count(a.name)) return true;
            } else if (rep_mentions_family(f.base.kern.arg, family)) {
                return true;
            }
        }
        if (t.mono.earg && rep_mentions_family(t.mono.earg, family)) return true;
    }
    return false;
}

bool rep_mentions_family(const RepPtr& r, const std::set<std::string>& family) {
    return poly_mentions_family(r->num, family) || poly_mentions_family(r->den, family);
}

}  // namespace

bool is_linear_homogeneous(const Expr& e, const std::set<std::string>& family) {
    const Fraction& f = e.rep();
    if (f.num.is_zero()) return true;
    if (poly_mentions_family(f.den, family)) return false;
    for (const Term& t : f.num.terms) {
        int deg = 0;
        for (const Factor& fac : t.mono.factors) {
            if (fac.base.is_atom()) {
                const Atom& a = fac.base.atom;
                if (a.kind == AtomKind::ArbJet && family.count(a.name)) deg += fac.exp;
            } else if (rep_mentions_family(fac.base.kern.arg, family)) {
                return false;
            }
        }
        if (t.mono.earg && rep_mentions_family(t.mono.earg, family)) return false;
        if (deg != 1) return false;
    }
    return true;
}

}  // namespace noether
