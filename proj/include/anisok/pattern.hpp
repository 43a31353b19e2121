#pragma once

#include <span>
#include <vector>

#include "anisok/vec3.hpp"

namespace anisok {

/// Axis-aligned box observation window [lo, hi].
class BoxWindow {
public:
    BoxWindow() = default;  // unit cube
    BoxWindow(const Vec3& lo, const Vec3& hi);

    static BoxWindow unit_cube() { return {}; }

    const Vec3& lo() const noexcept { return lo_; }
    const Vec3& hi() const noexcept { return hi_; }
    double side(int axis) const { return hi_[axis] - lo_[axis]; }
    Vec3 sides() const { return hi_ - lo_; }
    double min_side() const;
    double volume() const;
    bool contains(const Vec3& p) const;

    /// Window grown by `margin` on every face.
    BoxWindow dilated(double margin) const;

    /// True if side lengths agree within `rel_tol` (relative).
    bool same_shape(const BoxWindow& other, double rel_tol = 1e-12) const;

    friend bool operator==(const BoxWindow&, const BoxWindow&) = default;

private:
    Vec3 lo_{0.0, 0.0, 0.0};
    Vec3 hi_{1.0, 1.0, 1.0};
};

/// Finite simple point pattern observed in a box window. Every point lies in
/// the closed window and no two points coincide; both are checked on
/// construction.
class PointPattern {
public:
    PointPattern() = default;
    PointPattern(std::vector<Vec3> points, const BoxWindow& window);

    std::span<const Vec3> points() const noexcept { return points_; }
    const BoxWindow& window() const noexcept { return window_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }

    friend bool operator==(const PointPattern&, const PointPattern&) = default;

private:
    std::vector<Vec3> points_;
    BoxWindow window_;
};

}  // namespace anisok
