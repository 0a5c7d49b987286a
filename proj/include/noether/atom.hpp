#pragma once

#include <cstddef>
#include <string>

#include "noether/multi_index.hpp"

namespace noether {

enum class AtomKind { Parameter, Independent, Jet, ArbJet };

// A leaf symbol of the expression kernel.  Jet atoms are the formal
// coordinates u^alpha_{,J} (or shifted lattice values); ArbJet atoms are the
// same thing for the arbitrary functions gamma^r of a symmetry family.
struct Atom {
    AtomKind kind = AtomKind::Parameter;
    std::string name;
    MultiIndex index;       // Jet / ArbJet only
    std::size_t axis = 0;   // Independent only: position in the axis list
    bool is_real = true;    // Parameter only
    bool conj_mark = false; // Parameter only, and only when !is_real

    static Atom parameter(std::string name, bool is_real = true);
    static Atom independent(std::string name, std::size_t axis);
    static Atom jet(std::string field, MultiIndex index);
    static Atom arb(std::string fn, MultiIndex index);

    bool is_jet_like() const { return kind == AtomKind::Jet || kind == AtomKind::ArbJet; }

    int cmp(const Atom& other) const;
    bool operator==(const Atom& other) const { return cmp(other) == 0; }
    bool operator!=(const Atom& other) const { return cmp(other) != 0; }
    bool operator<(const Atom& other) const { return cmp(other) < 0; }
};

}  // namespace noether
