#pragma once

#include <stdexcept>
#include <string>

namespace rres {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  IoError,
  EnergyBelowLeftAsymptote,
  TransmissionChannelOpen,
  NoConvergence,
  GridExploded,
  NoZeroCrossing,
  MultipleCrossings,
  OutOfRange,
  DegenerateIntensity,
  PeaksNotSeparated,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace rres
