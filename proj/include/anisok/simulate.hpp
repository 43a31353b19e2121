#pragma once

// Simulators for the model families used to probe the directional K-functions:
// homogeneous Poisson, Poisson line cluster (PLCPP), Matérn hard-core (type II),
// force-biased ball packing, and the volume-preserving compression T_c.
//
// All generators are pure functions of (spec, window, seed).

#include <cstdint>
#include <vector>

#include "anisok/geometry.hpp"
#include "anisok/pattern.hpp"

namespace anisok {

struct PoissonSpec {
    double rho = 500.0;
};

struct PlcppSpec {
    double rho = 500.0;     // total intensity, must equal rho_l * alpha
    double rho_l = 200.0;   // lines per unit cross-section area
    double alpha = 2.5;     // points per unit length along a line
    double sigma = 0.001;   // displacement s.d. per orthogonal coordinate
    Direction axis = Direction::z_axis();
};

enum class HardCoreKind { matern, packing };

struct HardCoreSpec {
    double rho = 500.0;
    double radius = 0.05;
    HardCoreKind kind = HardCoreKind::matern;
};

class CompressionFactor {
public:
    explicit CompressionFactor(double c);
    double value() const noexcept { return c_; }

private:
    double c_;
};

void validate(const PoissonSpec& spec);
void validate(const PlcppSpec& spec);
void validate(const HardCoreSpec& spec);

/// Edge margin for simulating on a dilated window before clipping.
double simulation_margin(const BoxWindow& w, double sigma, double radius);

PointPattern simulate_poisson(double rho, const BoxWindow& w, std::uint64_t seed);

struct Line {
    Vec3 point;  // a point on the line
    Direction axis;
};

struct PlcppRealization {
    PointPattern pattern;
    std::vector<Line> lines;  // parent lines, including those with no retained points
};

PlcppRealization simulate_plcpp_with_lines(const PlcppSpec& spec, const BoxWindow& w, std::uint64_t seed);
PointPattern simulate_plcpp(const PlcppSpec& spec, const BoxWindow& w, std::uint64_t seed);

/// Proposal intensity of Matérn type II thinning achieving `rho` for hard-core distance R.
double matern_proposal_intensity(double rho, double radius);

PointPattern simulate_matern(const HardCoreSpec& spec, const BoxWindow& w, std::uint64_t seed);

struct PackingOptions {
    std::size_t max_sweeps = 20000;
    std::size_t growth_sweeps = 64;  // sweeps over which the radius is ramped up to R
};

struct PackingResult {
    PointPattern pattern;
    double final_radius = 0.0;  // half the minimum periodic centre distance
    std::size_t sweeps = 0;
};

/// Force-biased packing of round(rho |W|) balls of radius R under periodic
/// boundaries. Throws ErrorCode::not_converged with the achieved radius.
PackingResult simulate_packing_detailed(const HardCoreSpec& spec, const BoxWindow& w,
                                        std::uint64_t seed, const PackingOptions& opts = {});
PointPattern simulate_packing(const HardCoreSpec& spec, const BoxWindow& w, std::uint64_t seed);

/// Minimum distance between distinct points under the minimum-image convention of `w`.
double min_periodic_distance(std::span<const Vec3> points, const BoxWindow& w);
double min_pair_distance(std::span<const Vec3> points);

/// x -> (x1 / sqrt(c), x2 / sqrt(c), c x3), window included.
PointPattern compress(const PointPattern& p, CompressionFactor c);

/// Inverse of `compress`.
PointPattern decompress(const PointPattern& p, CompressionFactor c);

}  // namespace anisok
