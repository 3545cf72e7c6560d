#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ponp {

enum class ErrorKind {
  config,
  truncation_overflow,
  convergence,
  weight_not_resolvable,
  positivity,
  unsupported_domain,
  degree_too_high,
  internal_consistency,
  domain,
  out_of_validity,
  not_off_spectral,
  point_outside_collar,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::truncation_overflow: return "truncation-overflow";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::weight_not_resolvable: return "weight-not-resolvable";
    case ErrorKind::positivity: return "positivity";
    case ErrorKind::unsupported_domain: return "unsupported-domain";
    case ErrorKind::degree_too_high: return "degree-too-high";
    case ErrorKind::internal_consistency: return "internal-consistency";
    case ErrorKind::domain: return "domain";
    case ErrorKind::out_of_validity: return "out-of-validity";
    case ErrorKind::not_off_spectral: return "not-off-spectral";
    case ErrorKind::point_outside_collar: return "point-outside-collar";
  }
  return "unknown";
}

/// Process exit code used by the command line front end.
/// 2: bad input, 3: a numerical check failed, 4: request outside the validity region.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return 2;
    case ErrorKind::out_of_validity:
    case ErrorKind::not_off_spectral:
    case ErrorKind::point_outside_collar:
      return 4;
    default:
      return 3;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace ponp
