#pragma once

#include <stdexcept>
#include <string>

namespace volswap {

enum class ErrorKind {
    invalid_parameter,
    domain,
    pole,
    no_convergence,
    degenerate_interval,
    invalid_config,
    precondition,
    regime,
    degenerate_exponent,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

    // Bad user input, as opposed to a numerical method refusing to certify a result.
    bool is_input_error() const noexcept {
        switch (kind_) {
        case ErrorKind::no_convergence:
        case ErrorKind::precondition:
        case ErrorKind::pole:
            return false;
        default:
            return true;
        }
    }

private:
    ErrorKind kind_;
};

#define VOLSWAP_DEFINE_ERROR(Name, Kind)                                        \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
    };

VOLSWAP_DEFINE_ERROR(InvalidParameter, invalid_parameter)
VOLSWAP_DEFINE_ERROR(DomainError, domain)
VOLSWAP_DEFINE_ERROR(PoleError, pole)
VOLSWAP_DEFINE_ERROR(NoConvergence, no_convergence)
VOLSWAP_DEFINE_ERROR(DegenerateInterval, degenerate_interval)
VOLSWAP_DEFINE_ERROR(InvalidConfig, invalid_config)
VOLSWAP_DEFINE_ERROR(PreconditionError, precondition)
VOLSWAP_DEFINE_ERROR(RegimeError, regime)
VOLSWAP_DEFINE_ERROR(DegenerateExponent, degenerate_exponent)

#undef VOLSWAP_DEFINE_ERROR

} // namespace volswap
