#pragma once

#include <stdexcept>
#include <string>

namespace refinv {

// Stable error codes shared between the C++ core and the C API.  Every
// recoverable failure in the library throws Error with one of these codes;
// anything else escaping a public entry point is a bug and maps to Internal.
enum class Errc : int {
  Ok = 0,
  ParseError,
  NotBalanced,
  DegenerateDegree,
  NotEven,
  ZeroVector,
  BadSideAssignment,
  ChartDegenerate,
  IncompleteConstraint,
  NotPositive,
  EmptyChamberBox,
  SlotMismatch,
  NoConvergence,
  DegenerateCurve,
  BranchOutsidePositiveQuadrant,
  UncertifiedRounding,
  BudgetExceeded,
  TrackingStalled,
  InvarianceViolation,
  IoError,
  Internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::Ok: return "Ok";
    case Errc::ParseError: return "ParseError";
    case Errc::NotBalanced: return "NotBalanced";
    case Errc::DegenerateDegree: return "DegenerateDegree";
    case Errc::NotEven: return "NotEven";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::BadSideAssignment: return "BadSideAssignment";
    case Errc::ChartDegenerate: return "ChartDegenerate";
    case Errc::IncompleteConstraint: return "IncompleteConstraint";
    case Errc::NotPositive: return "NotPositive";
    case Errc::EmptyChamberBox: return "EmptyChamberBox";
    case Errc::SlotMismatch: return "SlotMismatch";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DegenerateCurve: return "DegenerateCurve";
    case Errc::BranchOutsidePositiveQuadrant: return "BranchOutsidePositiveQuadrant";
    case Errc::UncertifiedRounding: return "UncertifiedRounding";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::TrackingStalled: return "TrackingStalled";
    case Errc::InvarianceViolation: return "InvarianceViolation";
    case Errc::IoError: return "IoError";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace refinv
