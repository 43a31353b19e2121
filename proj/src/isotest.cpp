#include "anisok/isotest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "anisok/error.hpp"
#include "anisok/parallel.hpp"

namespace anisok {

namespace {

// Exact integral of |d| over a segment of width `width` on which d is linear
// from d0 to d1.
double segment_abs_integral(double d0, double d1, double width) {
    const double a0 = std::abs(d0);
    const double a1 = std::abs(d1);
    if ((d0 >= 0.0) == (d1 >= 0.0) || a0 == 0.0 || a1 == 0.0) return 0.5 * (a0 + a1) * width;
    return 0.5 * (a0 * a0 + a1 * a1) / (a0 + a1) * width;
}

std::size_t rank_index(std::size_t m, double q) {
    // ceil(q m), guarded against q m landing a rounding error above an integer
    const double x = q * static_cast<double>(m);
    auto k = static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
    return std::clamp<std::size_t>(k, 1, m) - 1;
}

void check_same_profiles(const AxisProfiles& p) {
    if (p.x.r_grid != p.y.r_grid || p.x.r_grid != p.z.r_grid) {
        throw Error(ErrorCode::invalid_argument, "axis profiles must share one r grid");
    }
    if (p.x.kind != p.y.kind || p.x.kind != p.z.kind) {
        throw Error(ErrorCode::invalid_argument, "axis profiles must be of one kind");
    }
}

void check_shapes(std::span<const PointPattern> patterns) {
    for (std::size_t i = 1; i < patterns.size(); ++i) {
        if (!patterns[i].window().same_shape(patterns[0].window())) {
            std::ostringstream os;
            os << "pattern " << i << " has a window shape different from pattern 0";
            throw Error(ErrorCode::window_mismatch, os.str());
        }
    }
}

const std::vector<Direction>& coordinate_axes() {
    static const std::vector<Direction> axes = direction_set(3);
    return axes;
}

}  // namespace

void validate(const TestConfig& cfg) {
    if (!(cfg.r1 >= 0.0) || !(cfg.r2 > cfg.r1)) {
        throw Error(ErrorCode::invalid_argument, "test interval needs 0 <= r1 < r2");
    }
    if (!(cfg.alpha_level > 0.0 && cfg.alpha_level < 1.0)) {
        throw Error(ErrorCode::invalid_argument, "significance level must lie in (0, 1)");
    }
    if (cfg.grid_points < 2) throw Error(ErrorCode::invalid_argument, "grid_points must be >= 2");
    if (cfg.r_max < 0.0) throw Error(ErrorCode::invalid_argument, "r_max must be >= 0");
}

AbsDiffIntegral::AbsDiffIntegral(std::span<const double> grid, std::span<const double> a,
                                 std::span<const double> b)
    : grid_(grid.begin(), grid.end()) {
    if (a.size() != grid.size() || b.size() != grid.size()) {
        throw Error(ErrorCode::invalid_argument, "profile and grid lengths differ");
    }
    if (grid.empty()) throw Error(ErrorCode::grid_coverage, "empty r grid");
    diff_.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) diff_[k] = a[k] - b[k];
    cumulative_.assign(grid.size(), 0.0);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        cumulative_[k] = cumulative_[k - 1] + segment_abs_integral(diff_[k - 1], diff_[k], grid_[k] - grid_[k - 1]);
    }
}

double AbsDiffIntegral::upto(double r) const {
    const double lo = grid_.front();
    const double hi = grid_.back();
    const double slack = 1e-12 * std::max(1.0, std::abs(hi));
    if (r < lo - slack || r > hi + slack) {
        std::ostringstream os;
        os << "integration bound " << r << " outside the profile grid [" << lo << ", " << hi << "]";
        throw Error(ErrorCode::grid_coverage, os.str());
    }
    r = std::clamp(r, lo, hi);
    if (grid_.size() == 1) return 0.0;
    std::size_t k = static_cast<std::size_t>(std::upper_bound(grid_.begin(), grid_.end(), r) - grid_.begin());
    k = std::clamp<std::size_t>(k, 1, grid_.size() - 1) - 1;
    const double width = grid_[k + 1] - grid_[k];
    const double t = r - grid_[k];
    if (!(width > 0.0) || t <= 0.0) return cumulative_[k];
    const double dr = diff_[k] + (diff_[k + 1] - diff_[k]) * (t / width);
    return cumulative_[k] + segment_abs_integral(diff_[k], dr, t);
}

double integrated_abs_difference(std::span<const double> grid, std::span<const double> a,
                                 std::span<const double> b, double r1, double r2) {
    const AbsDiffIntegral integral(grid, a, b);
    return integral.upto(r2) - integral.upto(r1);
}

double integration_scale(KKind kind, AspectRatio a) {
    return kind == KKind::conical ? std::sqrt(a.value() * a.value() + 1.0) : 1.0;
}

double t_xy(const AxisProfiles& p, const TestConfig& cfg) {
    check_same_profiles(p);
    return integration_scale(p.x.kind, p.x.aspect) *
           integrated_abs_difference(p.x.r_grid, p.x.values, p.y.values, cfg.r1, cfg.r2);
}

double t_z(const AxisProfiles& p, const TestConfig& cfg) {
    check_same_profiles(p);
    const double xz = integrated_abs_difference(p.x.r_grid, p.x.values, p.z.values, cfg.r1, cfg.r2);
    const double yz = integrated_abs_difference(p.x.r_grid, p.y.values, p.z.values, cfg.r1, cfg.r2);
    return integration_scale(p.x.kind, p.x.aspect) * std::min(xz, yz);
}

double nearest_rank_quantile(std::span<const double> sample, double q) {
    if (sample.empty()) throw Error(ErrorCode::empty_input, "quantile of an empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted[rank_index(sorted.size(), q)];
}

IsotropyTestResult decide(std::vector<double> t_xy_values, std::vector<double> t_z_values, double alpha_level,
                          bool exclude_self) {
    const std::size_t m = t_xy_values.size();
    if (m < 2) throw Error(ErrorCode::insufficient_replicates, "the isotropy test needs m >= 2 replicates");
    if (t_z_values.size() != m) throw Error(ErrorCode::invalid_argument, "t_xy and t_z lengths differ");
    if (!(alpha_level > 0.0 && alpha_level < 1.0)) {
        throw Error(ErrorCode::invalid_argument, "significance level must lie in (0, 1)");
    }

    IsotropyTestResult out;
    std::vector<double> sorted = t_xy_values;
    std::sort(sorted.begin(), sorted.end());
    const double q = 1.0 - alpha_level;
    out.threshold = sorted[rank_index(m, q)];
    out.rejections.resize(m);

    const std::size_t rank_without = rank_index(m - 1, q);
    std::size_t rejected = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double threshold = out.threshold;
        if (exclude_self) {
            // order statistic of the sample with one copy of t_xy[i] removed
            const auto self = static_cast<std::size_t>(
                std::lower_bound(sorted.begin(), sorted.end(), t_xy_values[i]) - sorted.begin());
            threshold = rank_without < self ? sorted[rank_without] : sorted[rank_without + 1];
        }
        out.rejections[i] = t_z_values[i] > threshold;
        rejected += out.rejections[i] ? 1 : 0;
    }
    out.power = static_cast<double>(rejected) / static_cast<double>(m);
    out.t_xy = std::move(t_xy_values);
    out.t_z = std::move(t_z_values);
    return out;
}

std::vector<double> test_grid(const BoxWindow& w, const TestConfig& cfg) {
    const double limit = default_r_max(w, cfg.aspect);
    const double r_max = cfg.r_max > 0.0 ? cfg.r_max : limit;
    if (r_max > limit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "r_max " << r_max << " exceeds the estimator validity bound " << limit << " for this window";
        throw Error(ErrorCode::out_of_range, os.str());
    }
    return make_r_grid(r_max, cfg.grid_points);
}

IsotropyTestResult run_test(std::span<const PointPattern> patterns, const TestConfig& cfg, unsigned threads) {
    validate(cfg);
    if (patterns.size() < 2) {
        throw Error(ErrorCode::insufficient_replicates, "the isotropy test needs m >= 2 replicates");
    }
    check_shapes(patterns);
    const ProfileRequest req{coordinate_axes(), {cfg.kind}, test_grid(patterns[0].window(), cfg), cfg.aspect};
    if (cfg.r2 > req.r_grid.back() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "r2 = " << cfg.r2 << " exceeds the profile grid end " << req.r_grid.back();
        throw Error(ErrorCode::grid_coverage, os.str());
    }

    const std::size_t m = patterns.size();
    std::vector<double> txy(m), tz(m);
    parallel_for(m, threads, [&](std::size_t i) {
        auto prof = k_profiles(patterns[i], req);
        const AxisProfiles axes{std::move(prof[0]), std::move(prof[1]), std::move(prof[2])};
        txy[i] = t_xy(axes, cfg);
        tz[i] = t_z(axes, cfg);
    });
    return decide(std::move(txy), std::move(tz), cfg.alpha_level, cfg.exclude_self);
}

std::vector<PowerPoint> power_curve(std::span<const PointPattern> patterns, const TestConfig& cfg_base,
                                    std::span<const double> r2_grid, unsigned threads) {
    TestConfig cfg = cfg_base;
    cfg.r2 = std::max(cfg.r1 + 1.0, 1.0);  // placeholder; each r2 is checked below
    validate(cfg);
    if (patterns.size() < 2) {
        throw Error(ErrorCode::insufficient_replicates, "the isotropy test needs m >= 2 replicates");
    }
    check_shapes(patterns);

    const ProfileRequest req{coordinate_axes(), {KKind::conical, KKind::cylindrical},
                             test_grid(patterns[0].window(), cfg), cfg.aspect};
    std::vector<double> r2s(r2_grid.begin(), r2_grid.end());
    if (r2s.empty()) r2s.assign(req.r_grid.begin() + 1, req.r_grid.end());
    for (double r2 : r2s) {
        if (!(r2 > cfg.r1) || r2 > req.r_grid.back() * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "r2 = " << r2 << " must lie in (r1, " << req.r_grid.back() << "]";
            throw Error(ErrorCode::grid_coverage, os.str());
        }
    }

    const std::size_t m = patterns.size();
    const std::size_t nr = r2s.size();
    // stats[kind][j][i]: T values of replicate i at r2s[j]
    std::vector<double> txy[2], tz[2];
    for (int k = 0; k < 2; ++k) {
        txy[k].assign(nr * m, 0.0);
        tz[k].assign(nr * m, 0.0);
    }

    parallel_for(m, threads, [&](std::size_t i) {
        const ProfileSums sums = profile_sums(patterns[i], req);
        for (int kind = 0; kind < 2; ++kind) {
            // numerators are direction-major: d * 2 + kind
            std::array<std::vector<double>, 3> S;
            for (int d = 0; d < 3; ++d) {
                const auto& numer = sums.numerators[static_cast<std::size_t>(d) * 2 + kind];
                S[d].resize(numer.size());
                for (std::size_t k = 0; k < numer.size(); ++k) S[d][k] = numer[k] / sums.rho2_hat;
            }
            const double scale = integration_scale(req.kinds[kind], cfg.aspect);
            const AbsDiffIntegral xy(req.r_grid, S[0], S[1]);
            const AbsDiffIntegral xz(req.r_grid, S[0], S[2]);
            const AbsDiffIntegral yz(req.r_grid, S[1], S[2]);
            const double xy1 = xy.upto(cfg.r1), xz1 = xz.upto(cfg.r1), yz1 = yz.upto(cfg.r1);
            for (std::size_t j = 0; j < nr; ++j) {
                txy[kind][j * m + i] = scale * (xy.upto(r2s[j]) - xy1);
                tz[kind][j * m + i] = scale * std::min(xz.upto(r2s[j]) - xz1, yz.upto(r2s[j]) - yz1);
            }
        }
    });

    std::vector<PowerPoint> out(nr);
    for (std::size_t j = 0; j < nr; ++j) {
        out[j].aspect = cfg.aspect.value();
        out[j].r2 = r2s[j];
        for (int kind = 0; kind < 2; ++kind) {
            std::vector<double> a(txy[kind].begin() + j * m, txy[kind].begin() + (j + 1) * m);
            std::vector<double> b(tz[kind].begin() + j * m, tz[kind].begin() + (j + 1) * m);
            const double power = decide(std::move(a), std::move(b), cfg.alpha_level, cfg.exclude_self).power;
            (req.kinds[kind] == KKind::conical ? out[j].power_conical : out[j].power_cylindrical) = power;
        }
    }
    return out;
}

std::vector<PowerPoint> power_curve(const ModelSpec& model, std::size_t m, std::uint64_t seed,
                                    const TestConfig& cfg_base, std::span<const double> r2_grid,
                                    unsigned threads) {
    const auto patterns = simulate_campaign(model, m, seed, threads);
    return power_curve(patterns, cfg_base, r2_grid, threads);
}

}  // namespace anisok
