#ifndef FKIT_ERRORS_HPP
#define FKIT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fkit {

// Failure class drives the CLI exit code: spec/input problems exit 1,
// numerical breakdowns exit 2, command-line misuse exit 3.
enum class ErrorClass { validation, numerical, usage };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string what) : std::runtime_error(std::move(what)), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

struct ValidationError : Error {
    explicit ValidationError(std::string what) : Error(ErrorClass::validation, std::move(what)) {}
};

struct NumericalError : Error {
    explicit NumericalError(std::string what) : Error(ErrorClass::numerical, std::move(what)) {}
};

struct UsageError : Error {
    explicit UsageError(std::string what) : Error(ErrorClass::usage, std::move(what)) {}
};

// --- parsing ---

struct SyntaxError : ValidationError {
    SyntaxError(std::string what, std::size_t offset)
        : ValidationError(what + " (byte " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

struct UnknownIdentifier : ValidationError {
    UnknownIdentifier(const std::string& name, std::size_t offset)
        : ValidationError("unknown identifier '" + name + "' (byte " + std::to_string(offset) + ")"),
          offset(offset) {}
    std::size_t offset;
};

struct ArityError : ValidationError {
    ArityError(const std::string& fn, std::size_t offset)
        : ValidationError("function '" + fn + "' takes exactly one argument (byte " +
                          std::to_string(offset) + ")"),
          offset(offset) {}
    std::size_t offset;
};

struct SpecFormatError : ValidationError {
    using ValidationError::ValidationError;
};

// --- coefficient validation ---

struct NotHermitian : ValidationError {
    NotHermitian(const std::string& which, double x, double defect)
        : ValidationError(which + " is not Hermitian at x = " + std::to_string(x) +
                          " (defect " + std::to_string(defect) + ")"),
          x(x) {}
    double x;
};

struct NotStrictlyPositive : ValidationError {
    NotStrictlyPositive(double x, double min_eig)
        : ValidationError("symmetric part is not strictly positive: min eigenvalue " +
                          std::to_string(min_eig) + " at x = " + std::to_string(x)),
          x(x), min_eig(min_eig) {}
    double x;
    double min_eig;
};

struct DegenerateOutsideFlags : ValidationError {
    DegenerateOutsideFlags(double x, double det)
        : ValidationError("|det A| = " + std::to_string(det) + " below tolerance at unflagged x = " +
                          std::to_string(x)),
          x(x) {}
    double x;
};

// --- ODE / quadrature ---

struct StepSizeUnderflow : NumericalError {
    explicit StepSizeUnderflow(double x)
        : NumericalError("step size underflow near x = " + std::to_string(x)), x(x) {}
    double x;
};

struct SingularA : NumericalError {
    explicit SingularA(double x)
        : NumericalError("A(x) is numerically singular at x = " + std::to_string(x)), x(x) {}
    double x;
};

struct IntervalMismatch : ValidationError {
    IntervalMismatch() : ValidationError("trajectories do not share the same interval") {}
};

// --- trace space / classification ---

struct DecompositionDefect : NumericalError {
    using NumericalError::NumericalError;
};

struct WellDefinednessError : ValidationError {
    WellDefinednessError() : ValidationError("classifying map undefined: V intersects ker T1 nontrivially") {}
};

struct InternalInconsistency : NumericalError {
    using NumericalError::NumericalError;
};

struct NotScalar : ValidationError {
    NotScalar() : ValidationError("operation requires a scalar (n = 1) non-degenerate system") {}
};

// --- defect analysis ---

struct UndecidableIntegrability : NumericalError {
    using NumericalError::NumericalError;
};

// --- solver ---

struct NotBijective : ValidationError {
    NotBijective() : ValidationError("boundary subspace does not define a bijective realisation") {}
};

struct IllConditioned : NumericalError {
    explicit IllConditioned(double cond)
        : NumericalError("trace system is ill-conditioned (cond = " + std::to_string(cond) + ")") {}
};

struct PreconditionNotSigned : ValidationError {
    PreconditionNotSigned()
        : ValidationError("realisation is not a bijective realisation with signed boundary map") {}
};

}  // namespace fkit

#endif
