#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace revguard {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class BackendErrorKind {
  kTimeout,
  kTransport,
  kHttpStatus,
  kRetryExhausted,
  kProtocol,
  kNotRegistered,
};

std::string_view to_string(BackendErrorKind kind);

// Failure talking to a model backend. For kRetryExhausted, last_cause()
// holds the kind of the final failed attempt.
class BackendError : public Error {
 public:
  BackendError(BackendErrorKind kind, std::string message, int http_status = 0,
               BackendErrorKind last_cause = BackendErrorKind::kTransport)
      : Error(std::move(message)), kind_(kind), last_cause_(last_cause), http_status_(http_status) {}

  BackendErrorKind kind() const { return kind_; }
  BackendErrorKind last_cause() const { return kind_ == BackendErrorKind::kRetryExhausted ? last_cause_ : kind_; }
  int http_status() const { return http_status_; }

  bool is_timeout() const { return last_cause() == BackendErrorKind::kTimeout; }

 private:
  BackendErrorKind kind_;
  BackendErrorKind last_cause_;
  int http_status_;
};

// A backend failure tagged with the pipeline stage that issued the call
// ("filter", "coach", "reframer").
class StageError : public Error {
 public:
  StageError(std::string stage, const BackendError& cause)
      : Error(stage + ": " + cause.what()), stage_(std::move(stage)), cause_(cause) {}

  const std::string& stage() const { return stage_; }
  const BackendError& cause() const { return cause_; }

 private:
  std::string stage_;
  BackendError cause_;
};

}  // namespace revguard
