/**
 * @file errors.hpp
 * @brief Error hierarchy shared by all modules.
 *
 * Every failure mode raised by the library is a subclass of `cellfront::Error`
 * carrying a stable symbolic name and a stable process exit code, so that the
 * command-line frontend can map any caught error to a machine-readable status.
 */
#ifndef CELLFRONT_ERRORS_HPP
#define CELLFRONT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cellfront {

/** Base class for all library errors; carries a stable name and exit code. */
class Error : public std::runtime_error {
public:
    Error(const char* name, int exit_code, const std::string& msg)
        : std::runtime_error(std::string(name) + ": " + msg),
          name_(name), exit_code_(exit_code) {}

    /** Stable symbolic error name (e.g. "NonConvergence"). */
    const char* name() const noexcept { return name_; }
    /** Stable nonzero process exit code for the CLI. */
    int exit_code() const noexcept { return exit_code_; }

private:
    const char* name_;
    int exit_code_;
};

#define CELLFRONT_DEFINE_ERROR(NAME, CODE)                                     \
    class NAME : public Error {                                                \
    public:                                                                    \
        explicit NAME(const std::string& msg) : Error(#NAME, CODE, msg) {}     \
    }

// Configuration / input problems.
CELLFRONT_DEFINE_ERROR(ConfigError, 2);
// Constitutive-law construction.
CELLFRONT_DEFINE_ERROR(NonPositiveEquilibriumDistance, 3);
// Scalar root-finding.
CELLFRONT_DEFINE_ERROR(NoBracket, 4);
CELLFRONT_DEFINE_ERROR(NonConvergence, 5);
// Individual-based model.
CELLFRONT_DEFINE_ERROR(StepTooLarge, 6);
// Free-boundary solver.
CELLFRONT_DEFINE_ERROR(InterfaceFailure, 7);
CELLFRONT_DEFINE_ERROR(DomainCollapse, 8);
CELLFRONT_DEFINE_ERROR(ToleranceNotMet, 9);
// Time integration.
CELLFRONT_DEFINE_ERROR(MaxStepsExceeded, 10);
CELLFRONT_DEFINE_ERROR(StepUnderflow, 11);
CELLFRONT_DEFINE_ERROR(NonFiniteDerivative, 12);
// Travelling-wave construction.
CELLFRONT_DEFINE_ERROR(BisectionFailure, 13);
CELLFRONT_DEFINE_ERROR(NoSignChange, 14);
CELLFRONT_DEFINE_ERROR(ProfileBlowup, 15);
// Measurement / comparison.
CELLFRONT_DEFINE_ERROR(InsufficientData, 16);
CELLFRONT_DEFINE_ERROR(InsufficientOverlap, 17);
// Filesystem.
CELLFRONT_DEFINE_ERROR(IoError, 18);

#undef CELLFRONT_DEFINE_ERROR

} // namespace cellfront

#endif // CELLFRONT_ERRORS_HPP
