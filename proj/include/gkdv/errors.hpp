#pragma once

#include <stdexcept>
#include <string>

namespace gkdv {

// Every failure mode the toolkit can report.  The CLI maps these to exit
// code 3 and a structured JSON object on stderr, so the set is closed: new
// failure modes get a new enumerator, not an ad-hoc exception type.
enum class Errc {
  syntax_error,         // malformed expression text
  unknown_identifier,   // identifier other than u / exp / log / sin / cos / abs
  domain_error,         // evaluation outside a node's domain (log(<=0), 0^-1, ...)
  degenerate_sampling,  // duplicate or invalid sample points
  inconsistent_nullity, // sampled nullspace disagrees with the structure of f
  forbidden_exponent,   // alpha in {0, -1, -2}
  negative_base,        // A^2(beta+1)(beta+2) < 0 with non-integer beta/2
  hypothesis_violated,  // potential well does not support a homoclinic orbit
  insufficient_tail,    // too few tail samples for a decay fit
  step_size_underflow,  // adaptive integrator cannot make progress
  wrong_case,           // operation applied to a trajectory of the wrong kind
  non_monotone,         // change of variables requires a monotone window
  out_of_range,         // query outside the computed span
  unstable_step,        // PDE step rejected (CFL violation or non-finite values)
  window_exceeded,      // transformed field no longer fits the periodic cell
  invalid_argument      // parameter outside its documented range
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }
  const char* code_name() const { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::syntax_error: return "SyntaxError";
    case Errc::unknown_identifier: return "UnknownIdentifier";
    case Errc::domain_error: return "DomainError";
    case Errc::degenerate_sampling: return "DegenerateSampling";
    case Errc::inconsistent_nullity: return "InconsistentNullity";
    case Errc::forbidden_exponent: return "ForbiddenExponent";
    case Errc::negative_base: return "NegativeBase";
    case Errc::hypothesis_violated: return "HypothesisViolated";
    case Errc::insufficient_tail: return "InsufficientTail";
    case Errc::step_size_underflow: return "StepSizeUnderflow";
    case Errc::wrong_case: return "WrongCase";
    case Errc::non_monotone: return "NonMonotone";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::unstable_step: return "UnstableStep";
    case Errc::window_exceeded: return "WindowExceeded";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace gkdv
