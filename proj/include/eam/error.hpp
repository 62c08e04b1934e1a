#pragma once

#include <stdexcept>
#include <string>

namespace eam {

enum class ErrorCode {
  InvalidArgument = 1,
  Io = 2,
  Parse = 3,
  Config = 4,
  OutOfRange = 5,
  Internal = 6,
};

/// Base exception for the library. The code survives the trip across the C API.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline Error invalid_argument(const std::string &what) { return {ErrorCode::InvalidArgument, what}; }
inline Error io_error(const std::string &what) { return {ErrorCode::Io, what}; }
inline Error parse_error(const std::string &what) { return {ErrorCode::Parse, what}; }
inline Error config_error(const std::string &what) { return {ErrorCode::Config, what}; }
inline Error out_of_range(const std::string &what) { return {ErrorCode::OutOfRange, what}; }

} // namespace eam
