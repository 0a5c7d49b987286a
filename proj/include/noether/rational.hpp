#pragma once

#include <gmpxx.h>

#include <string>

namespace noether {

// Exact rational scalar.  GMP does the heavy lifting; the engine never
// touches floating point except in the numeric-evaluation path.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

Rat rat_pow(const Rat& base, long exp);
long double rat_to_ld(const Rat& r);
std::string rat_str(const Rat& r);

// Element of Q(i): re + im*i.  Closes the coefficient field under the
// imaginary unit so that i*i = -1 happens in plain arithmetic.
struct CRat {
    Rat re;
    Rat im;

    CRat() : re(0), im(0) {}
    CRat(long v) : re(v), im(0) {}  // NOLINT(google-explicit-constructor)
    explicit CRat(Rat r) : re(std::move(r)), im(0) {}
    CRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

    static CRat imaginary() { return CRat(Rat(0), Rat(1)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_one() const { return re == 1 && im == 0; }
    bool is_real() const { return im == 0; }

    CRat conj() const { return CRat(re, -im); }

    CRat operator-() const { return CRat(-re, -im); }
    CRat operator+(const CRat& o) const { return CRat(re + o.re, im + o.im); }
    CRat operator-(const CRat& o) const { return CRat(re - o.re, im - o.im); }
    CRat operator*(const CRat& o) const {
        return CRat(re * o.re - im * o.im, re * o.im + im * o.re);
    }
    CRat operator/(const CRat& o) const;

    CRat& operator+=(const CRat& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    CRat& operator*=(const CRat& o) {
        *this = *this * o;
        return *this;
    }

    bool operator==(const CRat& o) const { return re == o.re && im == o.im; }
    bool operator!=(const CRat& o) const { return !(*this == o); }

    CRat pow(long e) const;
    std::string str() const;
};

int cmp(const CRat& a, const CRat& b);

}  // namespace noether
