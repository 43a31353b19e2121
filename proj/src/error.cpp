#include "anisok/error.hpp"

namespace anisok {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid argument";
        case ErrorCode::no_root: return "no root";
        case ErrorCode::degenerate_overlap: return "degenerate overlap";
        case ErrorCode::insufficient_points: return "insufficient points";
        case ErrorCode::out_of_range: return "out of range";
        case ErrorCode::infeasible_intensity: return "infeasible intensity";
        case ErrorCode::not_converged: return "not converged";
        case ErrorCode::empty_input: return "empty input";
        case ErrorCode::grid_coverage: return "grid coverage";
        case ErrorCode::insufficient_replicates: return "insufficient replicates";
        case ErrorCode::format: return "format";
        case ErrorCode::window_mismatch: return "window mismatch";
        case ErrorCode::io: return "i/o";
    }
    return "unknown";
}

}  // namespace anisok
