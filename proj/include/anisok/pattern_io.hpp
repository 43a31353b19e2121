#pragma once

// Plain-text point pattern files:
//
//   # free-form comment lines start with '#'
//   # units: um                      (optional, echoed into derived outputs)
//   window x_lo x_hi y_lo y_hi z_lo z_hi
//   x y z
//   ...
//
// Numbers are written in shortest round-trip decimal form.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "anisok/pattern.hpp"

namespace anisok {

struct PatternFile {
    PointPattern pattern;
    std::string units;
    std::vector<std::string> comments;  // comment lines without the leading '#', units line excluded
};

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

void write_pattern(std::ostream& os, const PatternFile& file);
void write_pattern_file(const std::filesystem::path& path, const PatternFile& file);

/// Throws ErrorCode::format with "<source>:<line>: ..." on malformed input.
PatternFile read_pattern(std::istream& is, std::string_view source = "<stream>");
PatternFile read_pattern_file(const std::filesystem::path& path);

/// Expands directories to their *.txt files (sorted, manifest files excluded).
std::vector<std::filesystem::path> expand_pattern_paths(const std::vector<std::filesystem::path>& inputs);

}  // namespace anisok
