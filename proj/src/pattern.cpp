#include "anisok/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "anisok/error.hpp"

namespace anisok {

BoxWindow::BoxWindow(const Vec3& lo, const Vec3& hi) : lo_(lo), hi_(hi) {
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(hi[i] > lo[i])) {
            std::ostringstream os;
            os << "window axis " << i << " needs lo < hi, got [" << lo[i] << ", " << hi[i] << "]";
            throw Error(ErrorCode::invalid_argument, os.str());
        }
    }
}

double BoxWindow::min_side() const {
    return std::min({side(0), side(1), side(2)});
}

double BoxWindow::volume() const {
    return side(0) * side(1) * side(2);
}

bool BoxWindow::contains(const Vec3& p) const {
    for (int i = 0; i < 3; ++i) {
        if (!(p[i] >= lo_[i] && p[i] <= hi_[i])) return false;
    }
    return true;
}

BoxWindow BoxWindow::dilated(double margin) const {
    const Vec3 m{margin, margin, margin};
    return {lo_ - m, hi_ + m};
}

bool BoxWindow::same_shape(const BoxWindow& other, double rel_tol) const {
    for (int i = 0; i < 3; ++i) {
        const double a = side(i);
        const double b = other.side(i);
        if (std::abs(a - b) > rel_tol * std::max(a, b)) return false;
    }
    return true;
}

PointPattern::PointPattern(std::vector<Vec3> points, const BoxWindow& window)
    : points_(std::move(points)), window_(window) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!window_.contains(points_[i])) {
            std::ostringstream os;
            os << "point " << i << " (" << points_[i].x << ", " << points_[i].y << ", "
               << points_[i].z << ") lies outside the window";
            throw Error(ErrorCode::invalid_argument, os.str());
        }
    }
    std::vector<Vec3> sorted = points_;
    std::sort(sorted.begin(), sorted.end(), lex_less);
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::invalid_argument, "point pattern contains duplicate points");
    }
}

}  // namespace anisok
