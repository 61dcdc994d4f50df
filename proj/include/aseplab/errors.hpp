#pragma once

#include <stdexcept>
#include <string>

namespace aseplab {

enum class Err {
    NONCONVERGENT,
    RECURRENCE_SINGULAR,
    DIVISION_BY_ZERO,
    INADMISSIBLE,
    MASS_CHECK_FAILED,
    DOMAIN,
    QUADRATURE_NONCONVERGED,
    SIGN_INCONSISTENT,
    X_NOT_IN_SUPPORT,
    CAP_EXCEEDED,
    EXPANSION_SINGULAR,
    NEGATIVE_MASS,
    PHASE,
    SOLVE_FAILED,
    UNKNOWN_CHECK,
};

inline const char* err_name(Err e) {
    switch (e) {
        case Err::NONCONVERGENT: return "NONCONVERGENT";
        case Err::RECURRENCE_SINGULAR: return "RECURRENCE_SINGULAR";
        case Err::DIVISION_BY_ZERO: return "DIVISION_BY_ZERO";
        case Err::INADMISSIBLE: return "INADMISSIBLE";
        case Err::MASS_CHECK_FAILED: return "MASS_CHECK_FAILED";
        case Err::DOMAIN: return "DOMAIN";
        case Err::QUADRATURE_NONCONVERGED: return "QUADRATURE_NONCONVERGED";
        case Err::SIGN_INCONSISTENT: return "SIGN_INCONSISTENT";
        case Err::X_NOT_IN_SUPPORT: return "X_NOT_IN_SUPPORT";
        case Err::CAP_EXCEEDED: return "CAP_EXCEEDED";
        case Err::EXPANSION_SINGULAR: return "EXPANSION_SINGULAR";
        case Err::NEGATIVE_MASS: return "NEGATIVE_MASS";
        case Err::PHASE: return "PHASE";
        case Err::SOLVE_FAILED: return "SOLVE_FAILED";
        case Err::UNKNOWN_CHECK: return "UNKNOWN_CHECK";
    }
    return "?";
}

class Error : public std::runtime_error {
  public:
    Error(Err code, const std::string& what)
        : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
    Err code() const { return code_; }

  private:
    Err code_;
};

}  // namespace aseplab
