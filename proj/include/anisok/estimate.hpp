#pragma once

// Ratio-unbiased estimators of the conical and cylindrical K-functions with
// translation edge correction:
//
//   K(r) = (1 / rho2_hat) * sum_{x1 != x2} w(x1, x2) 1[x2 - x1 in B(r)],
//   w(x1, x2) = 1 / |W cap W_{x2 - x1}|,   rho2_hat = n (n - 1) / |W|^2.
//
// Profiles are indexed by the cylinder radius r_cl; the cone and cylinder
// at each grid value come from equal_shape_link(r_cl, a).

#include <span>
#include <string_view>
#include <vector>

#include "anisok/geometry.hpp"
#include "anisok/pattern.hpp"

namespace anisok {

enum class KKind { conical, cylindrical };

std::string_view to_string(KKind kind);
KKind kind_from_string(std::string_view name);

enum class Pooling { ratio_of_sums, mean_of_ratios };

struct KProfile {
    KKind kind = KKind::cylindrical;
    Direction direction;
    std::vector<double> r_grid;  // r_cl values
    std::vector<double> values;
    AspectRatio aspect{2.0};
};

/// 1 / |W cap (W + t)|. Throws ErrorCode::degenerate_overlap if the translate misses W.
double translation_weight(const BoxWindow& w, const Vec3& t);

double intensity_sq_hat(const PointPattern& p);

double conical_k(const PointPattern& p, const Direction& u, const ConeParams& c);
double cylindrical_k(const PointPattern& p, const Direction& u, const CylinderParams& z);

/// Largest r_cl for which the equal-shape elements stay within the
/// translation-weight validity region, using the 0.45 safety factor.
double default_r_max(const BoxWindow& w, AspectRatio a);

/// `points` equally spaced values on [0, r_max].
std::vector<double> make_r_grid(double r_max, std::size_t points);

/// Unnormalized pair sums for a batch of (direction, kind) profiles over one
/// pattern. `numerators[d * kinds.size() + k]` is cumulative over the grid.
struct ProfileSums {
    std::vector<std::vector<double>> numerators;
    double rho2_hat = 0.0;
};

struct ProfileRequest {
    std::vector<Direction> directions;
    std::vector<KKind> kinds;
    std::vector<double> r_grid;
    AspectRatio aspect{2.0};
};

ProfileSums profile_sums(const PointPattern& p, const ProfileRequest& req);

KProfile k_profile(const PointPattern& p, const Direction& u, KKind kind, std::span<const double> r_grid,
                   AspectRatio a);

/// All requested (direction, kind) profiles of one pattern in a single pair
/// pass. Result order: direction-major, then kind.
std::vector<KProfile> k_profiles(const PointPattern& p, const ProfileRequest& req);

/// Replicate pooling. ratio_of_sums divides summed numerators by summed
/// rho2_hat; mean_of_ratios averages the per-pattern profiles.
std::vector<KProfile> pooled_profiles(std::span<const PointPattern> ps, const ProfileRequest& req,
                                      Pooling pooling = Pooling::ratio_of_sums, unsigned threads = 0);

KProfile pooled_profile(std::span<const PointPattern> ps, const Direction& u, KKind kind,
                        std::span<const double> r_grid, AspectRatio a,
                        Pooling pooling = Pooling::ratio_of_sums);

}  // namespace anisok
