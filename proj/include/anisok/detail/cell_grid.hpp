#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "anisok/pattern.hpp"

namespace anisok::detail {

// Uniform grid over a box for fixed-radius neighbour queries. Cells are at
// least `cell` wide; tiny cutoffs are capped at a few cells per point so the
// grid never outgrows the point set.
class CellGrid {
public:
    CellGrid(const BoxWindow& box, double cell, std::span<const Vec3> pts) : lo_(box.lo()) {
        const double cap = std::max(1.0, std::ceil(std::cbrt(8.0 * static_cast<double>(pts.size()))));
        for (int i = 0; i < 3; ++i) {
            n_[i] = static_cast<int>(std::clamp(std::floor(box.side(i) / cell), 1.0, cap));
            inv_[i] = n_[i] / box.side(i);
        }
        start_.assign(static_cast<std::size_t>(n_[0]) * n_[1] * n_[2] + 1, 0);
        std::vector<std::size_t> cell_of(pts.size());
        for (std::size_t p = 0; p < pts.size(); ++p) {
            cell_of[p] = linear(coords(pts[p]));
            ++start_[cell_of[p] + 1];
        }
        for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
        items_.resize(pts.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t p = 0; p < pts.size(); ++p) items_[fill[cell_of[p]]++] = p;
    }

    std::array<int, 3> coords(const Vec3& p) const {
        std::array<int, 3> c{};
        for (int i = 0; i < 3; ++i) {
            c[i] = std::clamp(static_cast<int>((p[i] - lo_[i]) * inv_[i]), 0, n_[i] - 1);
        }
        return c;
    }

    std::size_t linear(const std::array<int, 3>& c) const {
        return (static_cast<std::size_t>(c[0]) * n_[1] + c[1]) * n_[2] + c[2];
    }

    const std::array<int, 3>& dims() const { return n_; }

    std::span<const std::size_t> cell(std::size_t c) const {
        return std::span<const std::size_t>(items_).subspan(start_[c], start_[c + 1] - start_[c]);
    }

private:
    Vec3 lo_;
    std::array<int, 3> n_{};
    std::array<double, 3> inv_{};
    std::vector<std::size_t> start_;
    std::vector<std::size_t> items_;
};

}  // namespace anisok::detail
