#pragma once

#include <stdexcept>
#include <string>

namespace skl {

/// Base class for every error raised by the library. The CLI maps these to
/// structured report entries (exit 1) or configuration errors (exit 2).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "Error"; }
};

#define SKL_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
        const char* kind() const noexcept override { return #Name; }        \
    };

SKL_DEFINE_ERROR(TruncationOverflow)
SKL_DEFINE_ERROR(MismatchedTree)
SKL_DEFINE_ERROR(OddPropagationTime)
SKL_DEFINE_ERROR(NTooSmall)
SKL_DEFINE_ERROR(EtaOutOfRange)
SKL_DEFINE_ERROR(QuadratureFailure)
SKL_DEFINE_ERROR(ConventionMismatch)
SKL_DEFINE_ERROR(DegenerateWindow)
SKL_DEFINE_ERROR(OutOfSpectrum)
SKL_DEFINE_ERROR(InvalidArgument)

#undef SKL_DEFINE_ERROR

}  // namespace skl
