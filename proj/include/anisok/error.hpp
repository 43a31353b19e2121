#pragma once

#include <stdexcept>
#include <string>

namespace anisok {

enum class ErrorCode {
    invalid_argument,
    no_root,
    degenerate_overlap,
    insufficient_points,
    out_of_range,
    infeasible_intensity,
    not_converged,
    empty_input,
    grid_coverage,
    insufficient_replicates,
    format,
    window_mismatch,
    io,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace anisok
