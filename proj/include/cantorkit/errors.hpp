#ifndef CANTORKIT_ERRORS_HPP
#define CANTORKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cantorkit {

enum class ErrorCode {
  ParseError,
  EmptyTree,
  OutsideDomain,
  DomainMismatch,
  NotInjective,
  NotNowhereDense,
  InsufficientDepth,
  NotANewReal,
  Inconsistent,
  NotStronger,
  BadSupport,
  BadBlocks,
  BadId,
  TooLarge,
  BadSample,
};

inline const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyTree: return "EmptyTree";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::NotInjective: return "NotInjective";
    case ErrorCode::NotNowhereDense: return "NotNowhereDense";
    case ErrorCode::InsufficientDepth: return "InsufficientDepth";
    case ErrorCode::NotANewReal: return "NotANewReal";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::NotStronger: return "NotStronger";
    case ErrorCode::BadSupport: return "BadSupport";
    case ErrorCode::BadBlocks: return "BadBlocks";
    case ErrorCode::BadId: return "BadId";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::BadSample: return "BadSample";
  }
  return "UnknownError";
}

/// Every contract violation in the library is thrown as one of these; the CLI
/// prints `error: <name>: <detail>` and exits 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const { return code_; }
  const char* name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace cantorkit

#endif
