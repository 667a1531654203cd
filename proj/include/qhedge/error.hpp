#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

namespace qhedge {

// Base of every library error. `code()` is a stable machine-readable tag and
// `context()` carries coordinates or diagnostics (cell indices, damping
// parameter, step index, ...).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message,
        nlohmann::json context = nlohmann::json::object())
      : std::runtime_error(message),
        code_(std::move(code)),
        context_(std::move(context)) {}

  const std::string& code() const noexcept { return code_; }
  const nlohmann::json& context() const noexcept { return context_; }
  nlohmann::json& context() noexcept { return context_; }

  nlohmann::json to_json() const {
    return {{"error", code_}, {"message", what()}, {"context", context_}};
  }

 private:
  std::string code_;
  nlohmann::json context_;
};

#define QHEDGE_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& message,                            \
                  nlohmann::json context = nlohmann::json::object())     \
        : Error(tag, message, std::move(context)) {}                     \
  }

QHEDGE_DEFINE_ERROR(ParameterError, "parameter");
QHEDGE_DEFINE_ERROR(DegenerateSampleError, "degenerate_sample");
QHEDGE_DEFINE_ERROR(DegenerateMeasureError, "degenerate_measure");
QHEDGE_DEFINE_ERROR(InversionError, "inversion");
QHEDGE_DEFINE_ERROR(InversionAccuracyError, "inversion_accuracy");
QHEDGE_DEFINE_ERROR(DegenerateReturnsError, "degenerate_returns");
QHEDGE_DEFINE_ERROR(ConfigurationError, "configuration");
QHEDGE_DEFINE_ERROR(ConsistencyError, "internal_consistency");
QHEDGE_DEFINE_ERROR(SizeError, "size");
QHEDGE_DEFINE_ERROR(FormatError, "format");

#undef QHEDGE_DEFINE_ERROR

}  // namespace qhedge
