#pragma once

// Model specifications and replicate campaigns.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "anisok/simulate.hpp"

namespace anisok {

using BaseModel = std::variant<PoissonSpec, PlcppSpec, HardCoreSpec>;

/// One of the simulated families, optionally followed by compression. The
/// compressed form wraps a base model only, so nesting is impossible.
struct ModelSpec {
    BaseModel base = PoissonSpec{};
    std::optional<CompressionFactor> compression;
    BoxWindow window;  // simulation window, before compression
};

/// "poisson", "plcpp", "matern", "packing"; prefixed with "compressed-" when compressed.
std::string model_name(const ModelSpec& model);

void validate(const ModelSpec& model);

PointPattern simulate_replicate(const ModelSpec& model, std::uint64_t campaign_seed, std::uint64_t index);

struct CampaignManifest {
    ModelSpec model;
    std::size_t m = 1;
    std::uint64_t seed = 1;
    std::string output_dir;
};

/// Replicates 0..m-1 of the campaign; the result does not depend on `threads`.
std::vector<PointPattern> simulate_campaign(const ModelSpec& model, std::size_t m, std::uint64_t seed,
                                            unsigned threads = 0);

}  // namespace anisok
