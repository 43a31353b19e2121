#include "anisok/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "anisok/detail/cell_grid.hpp"
#include "anisok/error.hpp"
#include "anisok/rng.hpp"

namespace anisok {

namespace {

using detail::CellGrid;

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorCode::invalid_argument, what);
}

double ball_volume(double r) {
    return 4.0 / 3.0 * std::numbers::pi * r * r * r;
}

Vec3 uniform_in(const BoxWindow& w, Rng& rng) {
    Vec3 p;
    for (int i = 0; i < 3; ++i) {
        std::uniform_real_distribution<double> u(w.lo()[i], w.hi()[i]);
        p[i] = u(rng);
    }
    return p;
}

// Orthonormal pair spanning the plane orthogonal to `u`.
std::pair<Vec3, Vec3> orthonormal_basis(const Direction& u) {
    const Vec3& a = u.vec();
    int k = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(a[i]) < std::abs(a[k])) k = i;
    }
    Vec3 helper;
    helper[k] = 1.0;
    Vec3 e1 = cross(a, helper);
    e1 = (1.0 / norm(e1)) * e1;
    return {e1, cross(a, e1)};
}

Vec3 min_image(const Vec3& d, const Vec3& sides) {
    Vec3 out = d;
    for (int i = 0; i < 3; ++i) out[i] -= sides[i] * std::round(out[i] / sides[i]);
    return out;
}

Vec3 wrap(const Vec3& p, const BoxWindow& w) {
    Vec3 out = p;
    for (int i = 0; i < 3; ++i) {
        const double L = w.side(i);
        out[i] -= L * std::floor((out[i] - w.lo()[i]) / L);
        out[i] = std::clamp(out[i], w.lo()[i], w.hi()[i]);
    }
    return out;
}

// Calls fn(i, j) for each unordered pair once under periodic boundaries,
// restricted to pairs whose cells are neighbours at resolution `cutoff`.
template <typename Fn>
void for_each_periodic_pair(std::span<const Vec3> pts, const BoxWindow& w, double cutoff, Fn&& fn) {
    const CellGrid grid(w, cutoff, pts);
    const auto& n = grid.dims();
    if (n[0] < 3 || n[1] < 3 || n[2] < 3) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) fn(i, j);
        return;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto c = grid.coords(pts[i]);
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    const std::array<int, 3> nc{(c[0] + dx + n[0]) % n[0], (c[1] + dy + n[1]) % n[1],
                                                (c[2] + dz + n[2]) % n[2]};
                    for (std::size_t j : grid.cell(grid.linear(nc))) {
                        if (j > i) fn(i, j);
                    }
                }
    }
}

}  // namespace

CompressionFactor::CompressionFactor(double c) : c_(c) {
    if (!(c > 0.0) || c > 1.0) invalid("compression factor c must lie in (0, 1]");
}

void validate(const PoissonSpec& spec) {
    if (!(spec.rho > 0.0) || !std::isfinite(spec.rho)) invalid("poisson: rho must be > 0");
}

void validate(const PlcppSpec& spec) {
    if (!(spec.rho_l > 0.0) || !std::isfinite(spec.rho_l)) invalid("plcpp: rho_l must be > 0");
    if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha)) invalid("plcpp: alpha must be > 0");
    if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) invalid("plcpp: sigma must be >= 0");
    const double prod = spec.rho_l * spec.alpha;
    if (std::abs(spec.rho - prod) > 1e-9 * prod) {
        std::ostringstream os;
        os << "plcpp: rho (" << spec.rho << ") must equal rho_l * alpha (" << prod << ")";
        invalid(os.str());
    }
}

void validate(const HardCoreSpec& spec) {
    if (!(spec.rho > 0.0) || !std::isfinite(spec.rho)) invalid("hard-core: rho must be > 0");
    if (!(spec.radius > 0.0) || !std::isfinite(spec.radius)) invalid("hard-core: radius R must be > 0");
    const double fill = spec.rho * ball_volume(spec.radius);
    if (spec.kind == HardCoreKind::matern && !(fill < 1.0)) {
        std::ostringstream os;
        os << "matern: rho * (4/3) pi R^3 = " << fill << " must be < 1";
        throw Error(ErrorCode::infeasible_intensity, os.str());
    }
    if (spec.kind == HardCoreKind::packing && fill > 0.5) {
        std::ostringstream os;
        os << "packing: volume fraction " << fill << " exceeds 0.5";
        invalid(os.str());
    }
}

double simulation_margin(const BoxWindow& w, double sigma, double radius) {
    const double max_side = std::max({w.side(0), w.side(1), w.side(2)});
    return std::max({5.0 * sigma, radius, 0.1 * max_side});
}

PointPattern simulate_poisson(double rho, const BoxWindow& w, std::uint64_t seed) {
    validate(PoissonSpec{rho});
    Rng rng = make_rng(seed);
    std::poisson_distribution<long long> count(rho * w.volume());
    const long long n = count(rng);
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) pts.push_back(uniform_in(w, rng));
    return {std::move(pts), w};
}

PlcppRealization simulate_plcpp_with_lines(const PlcppSpec& spec, const BoxWindow& w, std::uint64_t seed) {
    validate(spec);
    Rng rng = make_rng(seed);
    const BoxWindow ext = w.dilated(simulation_margin(w, spec.sigma, 0.0));
    const auto [e1, e2] = orthonormal_basis(spec.axis);
    const Vec3& u = spec.axis.vec();

    // bounding box of the dilated window in (e1, e2, u) coordinates
    std::array<double, 3> lo{}, hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (int corner = 0; corner < 8; ++corner) {
        const Vec3 p{(corner & 1) ? ext.hi().x : ext.lo().x, (corner & 2) ? ext.hi().y : ext.lo().y,
                     (corner & 4) ? ext.hi().z : ext.lo().z};
        const std::array<double, 3> q{dot(p, e1), dot(p, e2), dot(p, u)};
        for (int i = 0; i < 3; ++i) {
            lo[i] = std::min(lo[i], q[i]);
            hi[i] = std::max(hi[i], q[i]);
        }
    }

    const double area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    const double length = hi[2] - lo[2];
    std::poisson_distribution<long long> line_count(spec.rho_l * area);
    std::poisson_distribution<long long> point_count(spec.alpha * length);
    std::uniform_real_distribution<double> us(lo[0], hi[0]);
    std::uniform_real_distribution<double> ut(lo[1], hi[1]);
    std::uniform_real_distribution<double> ua(lo[2], hi[2]);
    std::normal_distribution<double> shift(0.0, 1.0);

    PlcppRealization out;
    std::vector<Vec3> pts;
    const long long nl = line_count(rng);
    out.lines.reserve(static_cast<std::size_t>(nl));
    for (long long l = 0; l < nl; ++l) {
        const double s = us(rng);
        const double t = ut(rng);
        const Vec3 base = s * e1 + t * e2;
        out.lines.push_back({base, spec.axis});
        const long long k = point_count(rng);
        for (long long j = 0; j < k; ++j) {
            const double along = ua(rng);
            const double d1 = spec.sigma * shift(rng);
            const double d2 = spec.sigma * shift(rng);
            const Vec3 p = (s + d1) * e1 + (t + d2) * e2 + along * u;
            if (w.contains(p)) pts.push_back(p);
        }
    }
    out.pattern = PointPattern(std::move(pts), w);
    return out;
}

PointPattern simulate_plcpp(const PlcppSpec& spec, const BoxWindow& w, std::uint64_t seed) {
    return simulate_plcpp_with_lines(spec, w, seed).pattern;
}

double matern_proposal_intensity(double rho, double radius) {
    validate(HardCoreSpec{rho, radius, HardCoreKind::matern});
    const double v = ball_volume(radius);
    // rho = (1 - exp(-lambda v)) / v
    return -std::log1p(-rho * v) / v;
}

PointPattern simulate_matern(const HardCoreSpec& spec, const BoxWindow& w, std::uint64_t seed) {
    if (spec.kind != HardCoreKind::matern) invalid("simulate_matern needs kind = matern");
    const double lambda = matern_proposal_intensity(spec.rho, spec.radius);
    Rng rng = make_rng(seed);
    const BoxWindow ext = w.dilated(simulation_margin(w, 0.0, spec.radius));

    std::poisson_distribution<long long> count(lambda * ext.volume());
    const auto n = static_cast<std::size_t>(count(rng));
    std::vector<Vec3> proposals;
    proposals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) proposals.push_back(uniform_in(ext, rng));
    std::uniform_real_distribution<double> um(0.0, 1.0);
    std::vector<double> marks(n);
    for (auto& m : marks) m = um(rng);

    const double r2 = spec.radius * spec.radius;
    const CellGrid grid(ext, spec.radius, proposals);
    const auto& dims = grid.dims();
    std::vector<Vec3> kept;
    for (std::size_t i = 0; i < n; ++i) {
        if (!w.contains(proposals[i])) continue;
        const auto c = grid.coords(proposals[i]);
        bool retained = true;
        for (int dx = -1; dx <= 1 && retained; ++dx)
            for (int dy = -1; dy <= 1 && retained; ++dy)
                for (int dz = -1; dz <= 1 && retained; ++dz) {
                    const std::array<int, 3> nc{c[0] + dx, c[1] + dy, c[2] + dz};
                    if (nc[0] < 0 || nc[1] < 0 || nc[2] < 0 || nc[0] >= dims[0] || nc[1] >= dims[1] ||
                        nc[2] >= dims[2])
                        continue;
                    for (std::size_t j : grid.cell(grid.linear(nc))) {
                        if (j == i) continue;
                        const Vec3 d = proposals[j] - proposals[i];
                        const bool older = marks[j] < marks[i] || (marks[j] == marks[i] && j < i);
                        if (older && dot(d, d) < r2) {
                            retained = false;
                            break;
                        }
                    }
                }
        if (retained) kept.push_back(proposals[i]);
    }
    return {std::move(kept), w};
}

PackingResult simulate_packing_detailed(const HardCoreSpec& spec, const BoxWindow& w, std::uint64_t seed,
                                        const PackingOptions& opts) {
    if (spec.kind != HardCoreKind::packing) invalid("simulate_packing needs kind = packing");
    validate(spec);
    const auto n = static_cast<std::size_t>(std::llround(spec.rho * w.volume()));
    Rng rng = make_rng(seed);
    std::vector<Vec3> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back(uniform_in(w, rng));

    PackingResult result;
    if (n <= 1) {
        result.final_radius = spec.radius;
        result.pattern = PointPattern(std::move(pts), w);
        return result;
    }

    const double target = 2.0 * spec.radius;
    const Vec3 sides = w.sides();
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec3> shift(n);
    const std::size_t ramp = std::max<std::size_t>(1, opts.growth_sweeps);

    for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        // diameter grows so that the volume fraction ramps linearly up to the target
        const double frac = std::min(1.0, static_cast<double>(sweep + 1) / static_cast<double>(ramp));
        const double diameter = target * std::cbrt(frac);
        // pushing slightly beyond the diameter stops neighbours from nudging a pair back under it
        const double push_to = diameter * (1.0 + 1e-3);
        const double push_to2 = push_to * push_to;
        const double diameter2 = diameter * diameter;

        std::fill(shift.begin(), shift.end(), Vec3{});
        bool overlap = false;
        for_each_periodic_pair(pts, w, push_to, [&](std::size_t i, std::size_t j) {
            const Vec3 d = min_image(pts[j] - pts[i], sides);
            const double d2 = dot(d, d);
            if (d2 >= push_to2) return;
            if (d2 < diameter2) overlap = true;
            const double len = std::sqrt(d2);
            Vec3 dir;
            if (len > 0.0) {
                dir = (1.0 / len) * d;
            } else {
                dir = Vec3{gauss(rng), gauss(rng), gauss(rng)};
                dir = (1.0 / norm(dir)) * dir;
            }
            const double move = 0.5 * (push_to - len);
            shift[i] = shift[i] - move * dir;
            shift[j] = shift[j] + move * dir;
        });
        result.sweeps = sweep + 1;
        if (!overlap && frac >= 1.0) break;
        for (std::size_t i = 0; i < n; ++i) pts[i] = wrap(pts[i] + shift[i], w);
    }

    result.final_radius = 0.5 * min_periodic_distance(pts, w);
    if (result.final_radius < spec.radius) {
        std::ostringstream os;
        os << "force-biased packing did not converge after " << result.sweeps
           << " sweeps; achieved radius " << result.final_radius << " < " << spec.radius;
        throw Error(ErrorCode::not_converged, os.str());
    }
    result.pattern = PointPattern(std::move(pts), w);
    return result;
}

PointPattern simulate_packing(const HardCoreSpec& spec, const BoxWindow& w, std::uint64_t seed) {
    return simulate_packing_detailed(spec, w, seed).pattern;
}

double min_periodic_distance(std::span<const Vec3> points, const BoxWindow& w) {
    double best = std::numeric_limits<double>::infinity();
    const Vec3 sides = w.sides();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::min(best, norm(min_image(points[j] - points[i], sides)));
    return best;
}

double min_pair_distance(std::span<const Vec3> points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) best = std::min(best, norm(points[j] - points[i]));
    return best;
}

PointPattern compress(const PointPattern& p, CompressionFactor c) {
    const double s = 1.0 / std::sqrt(c.value());
    const Vec3 scale{s, s, c.value()};
    const auto map = [&](const Vec3& x) { return Vec3{scale.x * x.x, scale.y * x.y, scale.z * x.z}; };
    std::vector<Vec3> pts;
    pts.reserve(p.size());
    for (const Vec3& x : p.points()) pts.push_back(map(x));
    return {std::move(pts), BoxWindow(map(p.window().lo()), map(p.window().hi()))};
}

PointPattern decompress(const PointPattern& p, CompressionFactor c) {
    const double s = std::sqrt(c.value());
    const double zs = 1.0 / c.value();
    const auto map = [&](const Vec3& x) { return Vec3{s * x.x, s * x.y, zs * x.z}; };
    std::vector<Vec3> pts;
    pts.reserve(p.size());
    for (const Vec3& x : p.points()) pts.push_back(map(x));
    return {std::move(pts), BoxWindow(map(p.window().lo()), map(p.window().hi()))};
}

}  // namespace anisok
