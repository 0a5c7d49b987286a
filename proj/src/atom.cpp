#include "noether/atom.hpp"

#include <utility>

namespace noether {

Atom Atom::parameter(std::string name, bool is_real) {
    Atom a;
    a.kind = AtomKind::Parameter;
    a.name = std::move(name);
    a.is_real = is_real;
    return a;
}

Atom Atom::independent(std::string name, std::size_t axis) {
    Atom a;
    a.kind = AtomKind::Independent;
    a.name = std::move(name);
    a.axis = axis;
    return a;
}

Atom Atom::jet(std::string field, MultiIndex index) {
    Atom a;
    a.kind = AtomKind::Jet;
    a.name = std::move(field);
    a.index = std::move(index);
    return a;
}

Atom Atom::arb(std::string fn, MultiIndex index) {
    Atom a;
    a.kind = AtomKind::ArbJet;
    a.name = std::move(fn);
    a.index = std::move(index);
    return a;
}

int Atom::cmp(const Atom& other) const {
    if (kind != other.kind) return kind < other.kind ? -1 : 1;
    if (int c = name.compare(other.name); c != 0) return c < 0 ? -1 : 1;
    switch (kind) {
        case AtomKind::Parameter:
            if (is_real != other.is_real) return is_real ? -1 : 1;
            if (conj_mark != other.conj_mark) return conj_mark ? 1 : -1;
            return 0;
        case AtomKind::Independent:
            if (axis != other.axis) return axis < other.axis ? -1 : 1;
            return 0;
        case AtomKind::Jet:
        case AtomKind::ArbJet:
            return index.cmp(other.index);
    }
    return 0;
}

}  // namespace noether
