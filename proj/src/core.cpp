#include "hardy/error.hpp"
#include "hardy/ext_real.hpp"

#include <charconv>
#include <cmath>

namespace hardy {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::validation: return "VALIDATION";
    case ErrorCode::range: return "RANGE_ERROR";
    case ErrorCode::domain: return "DOMAIN_ERROR";
    case ErrorCode::non_convergence: return "NON_CONVERGENCE";
    case ErrorCode::ambiguous: return "AMBIGUOUS";
    case ErrorCode::noncoercive: return "NONCOERCIVE";
    case ErrorCode::insufficient_grid: return "INSUFFICIENT_GRID";
    case ErrorCode::monotonicity_broken: return "MONOTONICITY_BROKEN";
    case ErrorCode::max_iters: return "MAX_ITERS";
    }
    return "UNKNOWN";
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::non_convergence:
    case ErrorCode::ambiguous:
    case ErrorCode::monotonicity_broken:
    case ErrorCode::max_iters: return 3;
    default: return 2;
    }
}

double ExtReal::value() const {
    if (infinite_) throw Error(ErrorCode::range, "value() called on an infinite ExtReal");
    return value_;
}

} // namespace hardy
