#pragma once

#include <stdexcept>
#include <string>

namespace minext {

enum class ErrorKind {
    Parse,
    Validation,
    NotInjective,
    SelfIntersecting,
    Degenerate,
    OutOfRange,
    PointOutside,
    DeltaTooLarge,
    NotDeltaLinearization,
    ToleranceUnreachable,
    VerificationFailed,
    BudgetExhausted,
    PreconditionViolated,
    DegenerateImage,
    InvalidMesh,
    NotOnSkeleton,
    NotSubSkeleton,
    Io,
    Internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace minext
