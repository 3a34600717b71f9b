#pragma once

#include <stdexcept>
#include <string>

namespace cavspdc {

enum class ErrorCode {
  InvalidArgument,  // parameter outside its mathematical domain
  Config,           // invalid configuration, file schema, or bin geometry
  Io,               // filesystem failure
  FitDegenerate,    // ratio curve carries no phase information
  NoInterference,   // backward-pump analysis with nonpositive dip sum
  DivisionDomain,   // zero denominator in a reported quantity
  Capacity,         // requested simulation exceeds the event budget
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code);

}  // namespace cavspdc
