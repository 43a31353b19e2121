#pragma once

// Structuring elements of the directional K-functions: the double spherical
// cone C_u(r_cn, theta) and the cylinder Z_u(r_cl, h), plus the links that
// tie the two parametrizations together.

#include <cstddef>
#include <vector>

#include "anisok/vec3.hpp"

namespace anisok {

/// Unit vector. Construction normalizes; a zero vector is rejected.
class Direction {
public:
    Direction() = default;  // z-axis
    explicit Direction(const Vec3& v);
    Direction(double x, double y, double z) : Direction(Vec3{x, y, z}) {}

    static Direction x_axis() { return Direction(1, 0, 0); }
    static Direction y_axis() { return Direction(0, 1, 0); }
    static Direction z_axis() { return Direction(0, 0, 1); }

    const Vec3& vec() const noexcept { return u_; }
    double operator[](int i) const { return u_[i]; }

    friend bool operator==(const Direction&, const Direction&) = default;

private:
    Vec3 u_{0.0, 0.0, 1.0};
};

struct ConeParams {
    double r_cn = 0.0;   // slant height
    double theta = 0.0;  // half apex angle, radians
};

struct CylinderParams {
    double r_cl = 0.0;  // base radius
    double h = 0.0;     // half height
};

/// Cylinder aspect ratio h / r_cl (= cot theta of the inscribed cone). Must exceed 1.
class AspectRatio {
public:
    explicit AspectRatio(double a);
    double value() const noexcept { return a_; }

private:
    double a_;
};

void validate(const ConeParams& c);
void validate(const CylinderParams& z);

/// cos(theta) with the ball case theta = pi/2 mapped to exactly 0.
double cone_cos(double theta);

// Membership is closed on every comparison. v = 0 lies outside the cone.
bool cone_contains(const ConeParams& c, const Direction& u, const Vec3& v);
bool cylinder_contains(const CylinderParams& z, const Direction& u, const Vec3& v);

double cone_volume(const ConeParams& c);
double cylinder_volume(const CylinderParams& z);

/// Cone whose volume equals that of `z`, for a given internal half-height
/// h_cn of the cone (the free parameter of the equal-volume condition).
/// Solved by bisection; throws ErrorCode::no_root if no r_cn > h_cn exists.
ConeParams equal_volume_link(const CylinderParams& z, double h_cn);

struct EqualShape {
    CylinderParams cylinder;
    ConeParams cone;
};

/// Cylinder (r_cl, a r_cl) and its inscribed double cone
/// (r_cl sqrt(a^2 + 1), atan(1/a)).
EqualShape equal_shape_link(double r_cl, AspectRatio a);

/// n = 1: z-axis. n = 3: x, y, z. Otherwise a deterministic spiral set of
/// n directions over one hemisphere (directions are axes, so u and -u are
/// the same element).
std::vector<Direction> direction_set(std::size_t n);

}  // namespace anisok
