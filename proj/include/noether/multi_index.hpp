#pragma once

#include <cstddef>
#include <vector>

namespace noether {

enum class IndexMode { Derivative, Shift };

// Per-axis integer vector attached to a jet variable: derivative counts in
// continuous problems (entries >= 0), lattice offsets in discrete ones
// (entries signed).
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(IndexMode mode, std::vector<int> offsets);

    static MultiIndex zero(IndexMode mode, std::size_t axes);
    static MultiIndex unit(IndexMode mode, std::size_t axes, std::size_t axis, int step = 1);

    IndexMode mode() const { return mode_; }
    std::size_t axes() const { return off_.size(); }
    int operator[](std::size_t i) const { return off_[i]; }
    const std::vector<int>& offsets() const { return off_; }

    // |J|: total derivative order, or L1 distance for shifts.
    int order() const;
    bool is_zero() const;

    MultiIndex plus(const MultiIndex& other) const;
    MultiIndex plus_axis(std::size_t axis, int step) const;
    MultiIndex negated() const;  // shift mode only

    int cmp(const MultiIndex& other) const;
    bool operator==(const MultiIndex& other) const { return cmp(other) == 0; }
    bool operator!=(const MultiIndex& other) const { return cmp(other) != 0; }
    bool operator<(const MultiIndex& other) const { return cmp(other) < 0; }

private:
    IndexMode mode_ = IndexMode::Derivative;
    std::vector<int> off_;
};

}  // namespace noether
