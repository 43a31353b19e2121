#pragma once

// Replicated-pattern isotropy test: with S_x, S_y, S_z directional K
// estimates of replicate i,
//
//   T_xy,i = int_{r1}^{r2} |S_x - S_y| dr
//   T_z,i  = min( int |S_x - S_z| dr, int |S_y - S_z| dr )
//
// and replicate i rejects isotropy when T_z,i exceeds the empirical
// (1 - alpha) quantile of {T_xy,1..m}. Power is the rejection fraction.

#include <cstdint>
#include <span>
#include <vector>

#include "anisok/estimate.hpp"
#include "anisok/model.hpp"

namespace anisok {

struct TestConfig {
    KKind kind = KKind::cylindrical;
    AspectRatio aspect{2.0};
    double r1 = 0.0;  // bounds in r_cl units; conical integrals run over r_cn = r_cl sqrt(a^2 + 1)
    double r2 = 0.06;
    double alpha_level = 0.05;
    std::size_t grid_points = 512;
    double r_max = 0.0;         // profile grid upper end; 0 selects default_r_max
    bool exclude_self = false;  // compare T_z,i against the T_xy sample without replicate i
};

void validate(const TestConfig& cfg);

struct AxisProfiles {
    KProfile x, y, z;
};

struct IsotropyTestResult {
    std::vector<double> t_xy;
    std::vector<double> t_z;
    double threshold = 0.0;  // (1 - alpha) quantile of the full t_xy sample
    std::vector<bool> rejections;
    double power = 0.0;
};

/// Integral of |a(r) - b(r)| over [r1, r2], a and b linearly interpolated
/// on `grid`. Exact for piecewise-linear inputs, sign changes included.
double integrated_abs_difference(std::span<const double> grid, std::span<const double> a,
                                 std::span<const double> b, double r1, double r2);

/// Running integral of |a - b| from grid.front(), evaluable at any r in range.
class AbsDiffIntegral {
public:
    AbsDiffIntegral(std::span<const double> grid, std::span<const double> a, std::span<const double> b);
    double upto(double r) const;

private:
    std::vector<double> grid_;
    std::vector<double> diff_;
    std::vector<double> cumulative_;
};

/// Scale from the r_cl axis to the integration variable of `kind`.
double integration_scale(KKind kind, AspectRatio a);

double t_xy(const AxisProfiles& profiles, const TestConfig& cfg);
double t_z(const AxisProfiles& profiles, const TestConfig& cfg);

/// Nearest-rank empirical quantile: sorted[ceil(q m) - 1].
double nearest_rank_quantile(std::span<const double> sample, double q);

/// Rejection decisions from precomputed statistics.
IsotropyTestResult decide(std::vector<double> t_xy, std::vector<double> t_z, double alpha_level,
                          bool exclude_self = false);

/// Profile grid used by run_test and power_curve for a window.
std::vector<double> test_grid(const BoxWindow& w, const TestConfig& cfg);

IsotropyTestResult run_test(std::span<const PointPattern> patterns, const TestConfig& cfg,
                            unsigned threads = 0);

struct PowerPoint {
    double aspect = 2.0;
    double r2 = 0.0;
    double power_conical = 0.0;
    double power_cylindrical = 0.0;
};

/// Powers of both kinds at each r2 in `r2_grid`, reusing one set of profiles
/// (cfg_base.kind and cfg_base.r2 are ignored). An empty r2_grid selects
/// every positive point of the profile grid.
std::vector<PowerPoint> power_curve(std::span<const PointPattern> patterns, const TestConfig& cfg_base,
                                    std::span<const double> r2_grid, unsigned threads = 0);

std::vector<PowerPoint> power_curve(const ModelSpec& model, std::size_t m, std::uint64_t seed,
                                    const TestConfig& cfg_base, std::span<const double> r2_grid,
                                    unsigned threads = 0);

}  // namespace anisok
