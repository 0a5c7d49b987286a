#include "noether/rational.hpp"

#include <cstdlib>

#include "noether/errors.hpp"

namespace noether {

Rat rat_pow(const Rat& base, long exp) {
    if (exp == 0) return Rat(1);
    if (base == 0 && exp < 0) throw DivisionByZero();
    Rat b = exp > 0 ? base : Rat(1) / base;
    unsigned long n = exp > 0 ? static_cast<unsigned long>(exp)
                              : static_cast<unsigned long>(-exp);
    Rat acc(1);
    while (n > 0) {
        if (n & 1UL) acc *= b;
        b *= b;
        n >>= 1UL;
    }
    return acc;
}

long double rat_to_ld(const Rat& r) {
    // Route through decimal strings: strtold rounds correctly to the full
    // long double mantissa, which mpq_get_d (53-bit) would not.
    std::string n = r.get_num().get_str();
    std::string d = r.get_den().get_str();
    long double nn = strtold(n.c_str(), nullptr);
    long double dd = strtold(d.c_str(), nullptr);
    return nn / dd;
}

std::string rat_str(const Rat& r) {
    return r.get_str();
}

CRat CRat::operator/(const CRat& o) const {
    Rat n2 = o.re * o.re + o.im * o.im;
    if (n2 == 0) throw DivisionByZero();
    CRat z = *this * o.conj();
    return CRat(z.re / n2, z.im / n2);
}

CRat CRat::pow(long e) const {
    if (e == 0) return CRat(1);
    if (is_zero() && e < 0) throw DivisionByZero();
    CRat b = *this;
    if (e < 0) b = CRat(1) / b;
    unsigned long n = e > 0 ? static_cast<unsigned long>(e)
                            : static_cast<unsigned long>(-e);
    CRat acc(1);
    while (n > 0) {
        if (n & 1UL) acc *= b;
        b = b * b;
        n >>= 1UL;
    }
    return acc;
}

std::string CRat::str() const {
    if (im == 0) return rat_str(re);
    std::string imag = rat_str(im) + "*i";
    if (im == 1) imag = "i";
    if (im == -1) imag = "-i";
    if (re == 0) return imag;
    if (im > 0) return rat_str(re) + "+" + imag;
    return rat_str(re) + imag;  // imag already carries the sign
}

int cmp(const CRat& a, const CRat& b) {
    int c = ::cmp(a.re, b.re);
    if (c != 0) return c;
    return ::cmp(a.im, b.im);
}

}  // namespace noether
