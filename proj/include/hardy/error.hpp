#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

enum class ErrorCode {
    validation,          // parameter or input outside its admissible set
    range,               // p outside the interval where the object exists
    domain,              // state outside the half-space x >= 0
    non_convergence,     // integrator or iteration failed to reach its target
    ambiguous,           // diagnostic could not decide (reported, not guessed)
    noncoercive,         // linear Hardy problem potential exceeds nu^2 / r^2
    insufficient_grid,   // sample grid too short for the requested diagnostic
    monotonicity_broken, // monotone iterate left the sub/super sandwich
    max_iters,
};

const char* to_string(ErrorCode code);

/// Shortest round-trip decimal text; infinities and NaN as inf, -inf, nan.
std::string format_double(double v);

/// Process exit status for a given failure: 2 for input problems, 3 for numerics.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace hardy
