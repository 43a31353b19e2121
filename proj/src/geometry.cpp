#include "anisok/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "anisok/error.hpp"

namespace anisok {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorCode::invalid_argument, what);
}

}  // namespace

Direction::Direction(const Vec3& v) {
    const double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) invalid("direction must be a finite non-zero vector");
    u_ = (1.0 / n) * v;
}

AspectRatio::AspectRatio(double a) : a_(a) {
    if (!(a > 1.0) || !std::isfinite(a)) {
        std::ostringstream os;
        os << "aspect ratio must be finite and > 1, got " << a;
        invalid(os.str());
    }
}

void validate(const ConeParams& c) {
    if (!(c.r_cn > 0.0) || !std::isfinite(c.r_cn)) invalid("cone slant height r_cn must be > 0");
    if (!(c.theta > 0.0) || c.theta > kHalfPi) invalid("cone half angle theta must lie in (0, pi/2]");
}

void validate(const CylinderParams& z) {
    if (!(z.r_cl > 0.0) || !std::isfinite(z.r_cl)) invalid("cylinder radius r_cl must be > 0");
    if (!(z.h > 0.0) || !std::isfinite(z.h)) invalid("cylinder half height h must be > 0");
}

double cone_cos(double theta) {
    return theta >= kHalfPi ? 0.0 : std::cos(theta);
}

bool cone_contains(const ConeParams& c, const Direction& u, const Vec3& v) {
    const double len = norm(v);
    if (!(len > 0.0) || len > c.r_cn) return false;
    return std::abs(dot(v, u.vec())) / len >= cone_cos(c.theta);
}

bool cylinder_contains(const CylinderParams& z, const Direction& u, const Vec3& v) {
    const double axial = dot(v, u.vec());
    if (std::abs(axial) > z.h) return false;
    return norm(v - axial * u.vec()) <= z.r_cl;
}

double cone_volume(const ConeParams& c) {
    validate(c);
    const double r = c.r_cn;
    if (c.theta >= kHalfPi) return 4.0 / 3.0 * std::numbers::pi * r * r * r;
    // Two cones of height h = r cos(theta) plus two caps of height r - h add up
    // to (4 pi / 3) r^3 (1 - cos(theta)); the half-angle form keeps thin cones accurate.
    const double s = std::sin(0.5 * c.theta);
    return 4.0 / 3.0 * std::numbers::pi * r * r * r * 2.0 * s * s;
}

double cylinder_volume(const CylinderParams& z) {
    validate(z);
    return std::numbers::pi * z.r_cl * z.r_cl * 2.0 * z.h;
}

ConeParams equal_volume_link(const CylinderParams& z, double h_cn) {
    validate(z);
    if (!(h_cn > 0.0) || !std::isfinite(h_cn)) invalid("cone half height h_cn must be > 0");

    // With theta = acos(h_cn / r) the double cone has volume (4 pi / 3) r^2 (r - h_cn).
    // Bisect on the cap height d = r - h_cn, where (h_cn + d)^2 d is increasing,
    // so thin cones keep full relative precision.
    const double target = 1.5 * z.r_cl * z.r_cl * z.h;
    const auto excess = [&](double d) { return (h_cn + d) * (h_cn + d) * d - target; };

    double lo = 0.0;
    double hi = z.r_cl * std::sqrt(2.0 * z.h / h_cn) + 1.0;
    for (int i = 0; excess(hi) < 0.0; ++i) {
        if (i > 200 || !std::isfinite(hi)) {
            throw Error(ErrorCode::no_root, "equal_volume_link: no root with r_cn > h_cn");
        }
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 2000; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    const double d = 0.5 * (lo + hi);
    if (!(d > 0.0)) throw Error(ErrorCode::no_root, "equal_volume_link: root collapsed onto h_cn");
    const double r_cn = h_cn + d;
    // 1 - cos(theta) = d / r_cn
    return {r_cn, 2.0 * std::asin(std::sqrt(0.5 * d / r_cn))};
}

EqualShape equal_shape_link(double r_cl, AspectRatio a) {
    if (!(r_cl > 0.0) || !std::isfinite(r_cl)) invalid("r_cl must be > 0");
    const double av = a.value();
    EqualShape out;
    out.cylinder = {r_cl, av * r_cl};
    out.cone = {r_cl * std::sqrt(av * av + 1.0), std::atan(1.0 / av)};
    return out;
}

std::vector<Direction> direction_set(std::size_t n) {
    if (n == 0) invalid("direction_set needs n >= 1");
    if (n == 1) return {Direction::z_axis()};
    if (n == 3) return {Direction::x_axis(), Direction::y_axis(), Direction::z_axis()};

    // Fibonacci spiral on the upper hemisphere
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Direction> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * static_cast<double>(i);
        out.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
    }
    return out;
}

}  // namespace anisok
