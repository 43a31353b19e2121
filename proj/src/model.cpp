#include "anisok/model.hpp"

#include "anisok/error.hpp"
#include "anisok/parallel.hpp"
#include "anisok/rng.hpp"

namespace anisok {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string model_name(const ModelSpec& model) {
    std::string base = std::visit(overloaded{
                                      [](const PoissonSpec&) { return std::string("poisson"); },
                                      [](const PlcppSpec&) { return std::string("plcpp"); },
                                      [](const HardCoreSpec& s) {
                                          return std::string(s.kind == HardCoreKind::matern ? "matern"
                                                                                            : "packing");
                                      },
                                  },
                                  model.base);
    return model.compression ? "compressed-" + base : base;
}

void validate(const ModelSpec& model) {
    std::visit([](const auto& spec) { validate(spec); }, model.base);
}

PointPattern simulate_replicate(const ModelSpec& model, std::uint64_t campaign_seed, std::uint64_t index) {
    const std::uint64_t seed = replicate_seed(campaign_seed, index);
    PointPattern p = std::visit(
        overloaded{
            [&](const PoissonSpec& s) { return simulate_poisson(s.rho, model.window, seed); },
            [&](const PlcppSpec& s) { return simulate_plcpp(s, model.window, seed); },
            [&](const HardCoreSpec& s) {
                return s.kind == HardCoreKind::matern ? simulate_matern(s, model.window, seed)
                                                      : simulate_packing(s, model.window, seed);
            },
        },
        model.base);
    if (model.compression) p = compress(p, *model.compression);
    return p;
}

std::vector<PointPattern> simulate_campaign(const ModelSpec& model, std::size_t m, std::uint64_t seed,
                                            unsigned threads) {
    if (m == 0) throw Error(ErrorCode::invalid_argument, "a campaign needs m >= 1 replicates");
    validate(model);
    std::vector<PointPattern> out(m);
    parallel_for(m, threads, [&](std::size_t i) { out[i] = simulate_replicate(model, seed, i); });
    return out;
}

}  // namespace anisok
