#include "anisok/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "anisok/detail/cell_grid.hpp"
#include "anisok/detail/summation.hpp"
#include "anisok/error.hpp"
#include "anisok/parallel.hpp"

namespace anisok {

namespace {

using detail::CellGrid;
using detail::CompensatedSum;

std::vector<Vec3> sorted_points(const PointPattern& p) {
    std::vector<Vec3> pts(p.points().begin(), p.points().end());
    std::sort(pts.begin(), pts.end(), lex_less);
    return pts;
}

void check_extent(const BoxWindow& w, double extent, const char* what) {
    if (!(extent < w.min_side())) {
        std::ostringstream os;
        os << what << ": structuring element extent " << extent << " must be < min window side "
           << w.min_side();
        throw Error(ErrorCode::out_of_range, os.str());
    }
}

// Calls fn(v, len) for every unordered pair with |v| <= cutoff, v = x_j - x_i.
// Pairs are visited in an order fixed by the sorted point set.
template <typename Fn>
void for_each_close_pair(std::span<const Vec3> pts, const BoxWindow& w, double cutoff, Fn&& fn) {
    if (pts.size() < 2) return;
    const CellGrid grid(w, cutoff, pts);
    const auto& n = grid.dims();
    for (int cx = 0; cx < n[0]; ++cx)
        for (int cy = 0; cy < n[1]; ++cy)
            for (int cz = 0; cz < n[2]; ++cz) {
                const std::size_t self = grid.linear({cx, cy, cz});
                const auto home = grid.cell(self);
                for (std::size_t a = 0; a < home.size(); ++a) {
                    const Vec3& pi = pts[home[a]];
                    const auto visit = [&](std::size_t j) {
                        const Vec3 v = pts[j] - pi;
                        const double len = norm(v);
                        if (len <= cutoff) fn(v, len);
                    };
                    for (std::size_t b = a + 1; b < home.size(); ++b) visit(home[b]);
                    for (int dx = -1; dx <= 1; ++dx)
                        for (int dy = -1; dy <= 1; ++dy)
                            for (int dz = -1; dz <= 1; ++dz) {
                                const std::array<int, 3> nc{cx + dx, cy + dy, cz + dz};
                                if (nc[0] < 0 || nc[1] < 0 || nc[2] < 0 || nc[0] >= n[0] || nc[1] >= n[1] ||
                                    nc[2] >= n[2])
                                    continue;
                                const std::size_t other = grid.linear(nc);
                                if (other <= self) continue;
                                for (std::size_t j : grid.cell(other)) visit(j);
                            }
                }
            }
}

void check_grid(std::span<const double> r_grid) {
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        if (!(r_grid[k] >= 0.0) || !std::isfinite(r_grid[k])) {
            throw Error(ErrorCode::invalid_argument, "r grid values must be finite and >= 0");
        }
        if (k > 0 && r_grid[k] < r_grid[k - 1]) {
            throw Error(ErrorCode::invalid_argument, "r grid must be ascending");
        }
    }
}

// Per-grid-point element sizes; r_cl = 0 gives empty elements.
struct ElementTable {
    std::vector<double> r_cn;
    std::vector<double> r_cl;
    std::vector<double> h;
    double cos_theta = 0.0;
    double extent = 0.0;

    ElementTable(std::span<const double> grid, AspectRatio a) {
        cos_theta = cone_cos(std::atan(1.0 / a.value()));
        r_cn.reserve(grid.size());
        r_cl.reserve(grid.size());
        h.reserve(grid.size());
        for (double r : grid) {
            if (r > 0.0) {
                const EqualShape s = equal_shape_link(r, a);
                r_cn.push_back(s.cone.r_cn);
                r_cl.push_back(s.cylinder.r_cl);
                h.push_back(s.cylinder.h);
            } else {
                r_cn.push_back(0.0);
                r_cl.push_back(0.0);
                h.push_back(0.0);
            }
        }
        if (!grid.empty()) extent = std::max(r_cn.back(), std::hypot(r_cl.back(), h.back()));
    }
};

std::size_t first_at_least(const std::vector<double>& values, double x) {
    return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), x) - values.begin());
}

}  // namespace

std::string_view to_string(KKind kind) {
    return kind == KKind::conical ? "conical" : "cylindrical";
}

KKind kind_from_string(std::string_view name) {
    if (name == "conical" || name == "cone" || name == "cn") return KKind::conical;
    if (name == "cylindrical" || name == "cylinder" || name == "cl") return KKind::cylindrical;
    throw Error(ErrorCode::invalid_argument, "unknown K-function kind '" + std::string(name) + "'");
}

double translation_weight(const BoxWindow& w, const Vec3& t) {
    double overlap = 1.0;
    for (int i = 0; i < 3; ++i) {
        const double len = w.side(i) - std::abs(t[i]);
        if (!(len > 0.0)) {
            std::ostringstream os;
            os << "translation weight undefined: |t_" << i << "| = " << std::abs(t[i])
               << " >= window side " << w.side(i);
            throw Error(ErrorCode::degenerate_overlap, os.str());
        }
        overlap *= len;
    }
    return 1.0 / overlap;
}

double intensity_sq_hat(const PointPattern& p) {
    if (p.size() < 2) {
        throw Error(ErrorCode::insufficient_points, "at least two points are needed to estimate rho^2");
    }
    const double n = static_cast<double>(p.size());
    const double v = p.window().volume();
    return n * (n - 1.0) / (v * v);
}

double conical_k(const PointPattern& p, const Direction& u, const ConeParams& c) {
    validate(c);
    check_extent(p.window(), c.r_cn, "conical_k");
    const double rho2 = intensity_sq_hat(p);
    const auto pts = sorted_points(p);
    CompensatedSum sum;
    for_each_close_pair(pts, p.window(), c.r_cn, [&](const Vec3& v, double) {
        if (cone_contains(c, u, v)) sum += 2.0 * translation_weight(p.window(), v);
    });
    return sum.value() / rho2;
}

double cylindrical_k(const PointPattern& p, const Direction& u, const CylinderParams& z) {
    validate(z);
    const double extent = std::hypot(z.r_cl, z.h);
    check_extent(p.window(), extent, "cylindrical_k");
    const double rho2 = intensity_sq_hat(p);
    const auto pts = sorted_points(p);
    CompensatedSum sum;
    for_each_close_pair(pts, p.window(), extent * (1.0 + 1e-12), [&](const Vec3& v, double) {
        if (cylinder_contains(z, u, v)) sum += 2.0 * translation_weight(p.window(), v);
    });
    return sum.value() / rho2;
}

double default_r_max(const BoxWindow& w, AspectRatio a) {
    return 0.45 * w.min_side() / std::sqrt(a.value() * a.value() + 1.0);
}

std::vector<double> make_r_grid(double r_max, std::size_t points) {
    if (!(r_max > 0.0) || !std::isfinite(r_max)) {
        throw Error(ErrorCode::invalid_argument, "r_max must be > 0");
    }
    if (points < 2) throw Error(ErrorCode::invalid_argument, "an r grid needs at least two points");
    std::vector<double> grid(points);
    for (std::size_t k = 0; k < points; ++k) {
        grid[k] = r_max * static_cast<double>(k) / static_cast<double>(points - 1);
    }
    grid.back() = r_max;
    return grid;
}

ProfileSums profile_sums(const PointPattern& p, const ProfileRequest& req) {
    check_grid(req.r_grid);
    const std::size_t nk = req.kinds.size();
    const std::size_t ng = req.r_grid.size();
    ProfileSums out;
    out.rho2_hat = intensity_sq_hat(p);
    out.numerators.assign(req.directions.size() * nk, std::vector<double>(ng, 0.0));
    if (ng == 0 || nk == 0 || req.directions.empty()) return out;

    const ElementTable table(req.r_grid, req.aspect);
    check_extent(p.window(), table.extent, "k_profile");
    const bool want_cone = std::find(req.kinds.begin(), req.kinds.end(), KKind::conical) != req.kinds.end();
    const bool want_cyl = std::find(req.kinds.begin(), req.kinds.end(), KKind::cylindrical) != req.kinds.end();

    // bucket[d][kind][k]: weight mass of pairs first contained at grid index k
    const std::size_t nd = req.directions.size();
    std::vector<CompensatedSum> cone_bins(want_cone ? nd * ng : 0);
    std::vector<CompensatedSum> cyl_bins(want_cyl ? nd * ng : 0);

    const auto pts = sorted_points(p);
    // slack so that rounding in |v| cannot drop a pair on the outer boundary
    const double cutoff = table.extent * (1.0 + 1e-12);
    for_each_close_pair(pts, p.window(), cutoff, [&](const Vec3& v, double len) {
        if (!(len > 0.0)) return;
        const double weight = 2.0 * translation_weight(p.window(), v);
        for (std::size_t d = 0; d < nd; ++d) {
            const Vec3& u = req.directions[d].vec();
            const double axial = dot(v, u);
            if (want_cone && std::abs(axial) / len >= table.cos_theta) {
                const std::size_t k = first_at_least(table.r_cn, len);
                if (k < ng) cone_bins[d * ng + k] += weight;
            }
            if (want_cyl) {
                const double radial = norm(v - axial * u);
                const std::size_t k =
                    std::max(first_at_least(table.r_cl, radial), first_at_least(table.h, std::abs(axial)));
                if (k < ng) cyl_bins[d * ng + k] += weight;
            }
        }
    });

    for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t ki = 0; ki < nk; ++ki) {
            const auto& bins = req.kinds[ki] == KKind::conical ? cone_bins : cyl_bins;
            auto& numer = out.numerators[d * nk + ki];
            CompensatedSum running;
            for (std::size_t k = 0; k < ng; ++k) {
                running += bins[d * ng + k].value();
                numer[k] = running.value();
            }
        }
    }
    return out;
}

std::vector<KProfile> k_profiles(const PointPattern& p, const ProfileRequest& req) {
    const ProfileSums sums = profile_sums(p, req);
    std::vector<KProfile> out;
    out.reserve(sums.numerators.size());
    for (std::size_t d = 0; d < req.directions.size(); ++d) {
        for (std::size_t ki = 0; ki < req.kinds.size(); ++ki) {
            KProfile prof{req.kinds[ki], req.directions[d], req.r_grid, {}, req.aspect};
            const auto& numer = sums.numerators[d * req.kinds.size() + ki];
            prof.values.reserve(numer.size());
            for (double x : numer) prof.values.push_back(x / sums.rho2_hat);
            out.push_back(std::move(prof));
        }
    }
    return out;
}

KProfile k_profile(const PointPattern& p, const Direction& u, KKind kind, std::span<const double> r_grid,
                   AspectRatio a) {
    ProfileRequest req{{u}, {kind}, std::vector<double>(r_grid.begin(), r_grid.end()), a};
    return std::move(k_profiles(p, req).front());
}

std::vector<KProfile> pooled_profiles(std::span<const PointPattern> ps, const ProfileRequest& req,
                                      Pooling pooling, unsigned threads) {
    if (ps.empty()) throw Error(ErrorCode::empty_input, "pooling needs at least one pattern");
    for (std::size_t i = 1; i < ps.size(); ++i) {
        if (!ps[i].window().same_shape(ps[0].window())) {
            std::ostringstream os;
            os << "pattern " << i << " has a window shape different from pattern 0";
            throw Error(ErrorCode::window_mismatch, os.str());
        }
    }

    std::vector<ProfileSums> sums(ps.size());
    parallel_for(ps.size(), threads, [&](std::size_t i) { sums[i] = profile_sums(ps[i], req); });

    const std::size_t nprof = req.directions.size() * req.kinds.size();
    const std::size_t ng = req.r_grid.size();
    std::vector<KProfile> out;
    out.reserve(nprof);
    CompensatedSum rho2_total;
    for (const auto& s : sums) rho2_total += s.rho2_hat;

    for (std::size_t j = 0; j < nprof; ++j) {
        const std::size_t d = j / req.kinds.size();
        const std::size_t ki = j % req.kinds.size();
        KProfile prof{req.kinds[ki], req.directions[d], req.r_grid, std::vector<double>(ng), req.aspect};
        for (std::size_t k = 0; k < ng; ++k) {
            CompensatedSum acc;
            if (pooling == Pooling::ratio_of_sums) {
                for (const auto& s : sums) acc += s.numerators[j][k];
                prof.values[k] = acc.value() / rho2_total.value();
            } else {
                for (const auto& s : sums) acc += s.numerators[j][k] / s.rho2_hat;
                prof.values[k] = acc.value() / static_cast<double>(sums.size());
            }
        }
        out.push_back(std::move(prof));
    }
    return out;
}

KProfile pooled_profile(std::span<const PointPattern> ps, const Direction& u, KKind kind,
                        std::span<const double> r_grid, AspectRatio a, Pooling pooling) {
    ProfileRequest req{{u}, {kind}, std::vector<double>(r_grid.begin(), r_grid.end()), a};
    return std::move(pooled_profiles(ps, req, pooling, 1).front());
}

}  // namespace anisok
