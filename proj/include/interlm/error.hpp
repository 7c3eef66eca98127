#ifndef INTERLM_ERROR_HPP
#define INTERLM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace interlm {

enum class ErrorCode {
  io,
  parse,
  invalid_argument,
  schema,
  numeric,
};

/// Machine-parsable code printed by the CLI, e.g. "E_PARSE".
constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "E_IO";
    case ErrorCode::parse: return "E_PARSE";
    case ErrorCode::invalid_argument: return "E_INVALID_ARGUMENT";
    case ErrorCode::schema: return "E_SCHEMA";
    case ErrorCode::numeric: return "E_NUMERIC";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace interlm

#endif  // INTERLM_ERROR_HPP
