#include "noether/multi_index.hpp"

#include <cstdlib>
#include <utility>

#include "noether/errors.hpp"

namespace noether {

MultiIndex::MultiIndex(IndexMode mode, std::vector<int> offsets)
    : mode_(mode), off_(std::move(offsets)) {
    if (mode_ == IndexMode::Derivative) {
        for (int v : off_) {
            if (v < 0) throw EngineError("derivative multi-index entries must be >= 0");
        }
    }
}

MultiIndex MultiIndex::zero(IndexMode mode, std::size_t axes) {
    return MultiIndex(mode, std::vector<int>(axes, 0));
}

MultiIndex MultiIndex::unit(IndexMode mode, std::size_t axes, std::size_t axis, int step) {
    std::vector<int> off(axes, 0);
    off.at(axis) = step;
    return MultiIndex(mode, std::move(off));
}

int MultiIndex::order() const {
    int s = 0;
    for (int v : off_) s += std::abs(v);
    return s;
}

bool MultiIndex::is_zero() const {
    for (int v : off_) {
        if (v != 0) return false;
    }
    return true;
}

MultiIndex MultiIndex::plus(const MultiIndex& other) const {
    if (other.axes() != axes()) throw EngineError("multi-index axis count mismatch");
    std::vector<int> off(off_);
    for (std::size_t i = 0; i < off.size(); ++i) off[i] += other.off_[i];
    return MultiIndex(mode_, std::move(off));
}

MultiIndex MultiIndex::plus_axis(std::size_t axis, int step) const {
    std::vector<int> off(off_);
    off.at(axis) += step;
    return MultiIndex(mode_, std::move(off));
}

MultiIndex MultiIndex::negated() const {
    if (mode_ != IndexMode::Shift) throw EngineError("negated() requires shift mode");
    std::vector<int> off(off_);
    for (int& v : off) v = -v;
    return MultiIndex(mode_, std::move(off));
}

int MultiIndex::cmp(const MultiIndex& other) const {
    if (mode_ != other.mode_) return mode_ < other.mode_ ? -1 : 1;
    if (off_.size() != other.off_.size()) return off_.size() < other.off_.size() ? -1 : 1;
    for (std::size_t i = 0; i < off_.size(); ++i) {
        if (off_[i] != other.off_[i]) return off_[i] < other.off_[i] ? -1 : 1;
    }
    return 0;
}

}  // namespace noether
