#include "noether/verifier.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "noether/errors.hpp"

namespace noether {

const char* to_string(ZeroStatus s) {
    switch (s) {
        case ZeroStatus::ProvedZero:
            return "ProvedZero";
        case ZeroStatus::ProbablyZero:
            return "ProbablyZero";
        case ZeroStatus::Nonzero:
            return "Nonzero";
        case ZeroStatus::Inconclusive:
            return "Inconclusive";
    }
    return "?";
}

namespace {

// mt19937_64 output is pinned by the standard, so verdicts are reproducible
// across platforms for a fixed seed.
long sample_int(std::mt19937_64& rng, long range = 20) {
    for (;;) {
        long v = static_cast<long>(rng() % static_cast<unsigned long>(2 * range + 1)) - range;
        if (v != 0) return v;
    }
}

long double sample_float(std::mt19937_64& rng) {
    long double u = static_cast<long double>(rng() >> 11) /
                    static_cast<long double>(1ULL << 53);
    return 4.0L * u - 2.0L;
}

std::string format_value(const EvalValue& v) {
    if (v.exact) return v.q.str();
    std::ostringstream os;
    os.precision(17);
    os << static_cast<double>(v.f.real());
    if (v.f.imag() != 0) {
        os << (v.f.imag() < 0 ? " - " : " + ")
           << std::fabs(static_cast<double>(v.f.imag())) << "*i";
    }
    return os.str();
}

}  // namespace

Verdict zero_test(const Expr& e, const ZeroTestOptions& opts) {
    Verdict v;
    v.seed = opts.seed;
    if (e.is_zero()) {
        v.status = ZeroStatus::ProvedZero;
        return v;
    }
    bool exact_path = e.is_rational_form();
    std::set<Atom> atoms = e.atoms();
    std::mt19937_64 rng(opts.seed);

    for (int trial = 0; trial < opts.trials; ++trial) {
        int resamples = 0;
        for (;;) {
            EvalPoint pt;
            for (const Atom& a : atoms) {
                if (exact_path) {
                    pt[a] = EvalValue(CRat(Rat(sample_int(rng))));
                } else {
                    pt[a] = EvalValue(sample_float(rng));
                }
            }
            try {
                EvalResult res = evaluate(e, pt);
                v.trials_used = trial + 1;
                if (res.value.exact) {
                    if (!res.value.q.is_zero()) {
                        v.status = ZeroStatus::Nonzero;
                        v.counterexample = pt;
                        v.counterexample_value = format_value(res.value);
                        return v;
                    }
                } else {
                    long double mag = std::abs(res.value.f);
                    if (mag > v.max_residual) v.max_residual = mag;
                    if (mag > opts.tol * (1.0L + res.max_term)) {
                        v.status = ZeroStatus::Nonzero;
                        v.counterexample = pt;
                        v.counterexample_value = format_value(res.value);
                        return v;
                    }
                }
                break;
            } catch (const DivisionByZero&) {
                if (++resamples > 50) {
                    v.status = ZeroStatus::Inconclusive;
                    v.trials_used = trial + 1;
                    return v;
                }
            } catch (const DomainError&) {
                if (++resamples > 50) {
                    v.status = ZeroStatus::Inconclusive;
                    v.trials_used = trial + 1;
                    return v;
                }
            }
        }
    }
    if (exact_path) {
        // A nonzero canonical rational function is nonzero as a function;
        // the sampling only hunts a witness.  If every sample landed on a
        // root (possible for polynomials that vanish on the whole default
        // grid), widen the range: the root set is finite, so this stops.
        for (int level = 1; level <= 40; ++level) {
            long range = 20L << level;
            for (int t = 0; t < 20; ++t) {
                EvalPoint pt;
                for (const Atom& a : atoms) pt[a] = EvalValue(CRat(Rat(sample_int(rng, range))));
                try {
                    EvalResult res = evaluate(e, pt);
                    ++v.trials_used;
                    if (!res.value.q.is_zero()) {
                        v.status = ZeroStatus::Nonzero;
                        v.counterexample = pt;
                        v.counterexample_value = format_value(res.value);
                        return v;
                    }
                } catch (const DivisionByZero&) {
                } catch (const DomainError&) {
                }
            }
        }
        v.status = ZeroStatus::Inconclusive;
        return v;
    }
    v.status = ZeroStatus::ProbablyZero;
    v.trials_used = opts.trials;
    return v;
}

}  // namespace noether
