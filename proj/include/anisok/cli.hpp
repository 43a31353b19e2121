#pragma once

// Command-line front end: simulate, estimate, test, power.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anisok/model.hpp"

namespace anisok::cli {

struct Options {
    // model
    std::string model = "poisson";  // poisson | plcpp | matern | packing
    std::optional<double> rho;      // plcpp default: rho_l * alpha; otherwise 500
    double rho_l = 200.0;
    double alpha = 2.5;
    double sigma = 0.001;
    double hardcore_r = 0.05;
    std::optional<double> compress_c;
    std::string window = "0,1,0,1,0,1";

    // campaign
    std::size_t m = 1000;
    std::uint64_t seed = 1;

    // estimation and testing
    std::string kind = "both";
    std::vector<double> aspect{2.0};
    std::optional<double> r_max;
    std::size_t grid = 512;
    std::string r2_grid;  // "a,b,c" or "lo:hi:n"; empty selects a command default
    double level = 0.05;
    std::string pooling = "ratio";
    bool exclude_self = false;

    std::vector<std::string> input;
    std::string out;
    std::string details;
    unsigned threads = 0;
};

ModelSpec build_model(const Options& opts);

/// "a,b,c" lists values; "lo:hi:n" gives n equally spaced values on [lo, hi].
std::vector<double> parse_r2_grid(std::string_view text);

/// Flat key = value text, readable back through --config.
std::string manifest_text(const Options& opts);

void cmd_simulate(const Options& opts, std::ostream& log);
void cmd_estimate(const Options& opts, std::ostream& out);
void cmd_test(const Options& opts, std::ostream& out);
void cmd_power(const Options& opts, std::ostream& out);

/// Parses argv and dispatches. CSV goes to `out` when --out is empty or "-".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace anisok::cli
