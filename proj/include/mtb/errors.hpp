#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mtb {

enum class ErrorKind { input, config, profile, solver, analysis, io };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Non-convergence carries the last residual so callers can report it.
class SolverError : public Error {
public:
  SolverError(const std::string& what, double last_residual)
      : Error(ErrorKind::solver, what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

private:
  double last_residual_;
};

inline Error input_error(std::string msg) { return Error(ErrorKind::input, std::move(msg)); }
inline Error config_error(std::string msg) { return Error(ErrorKind::config, std::move(msg)); }
inline Error profile_error(std::string msg) { return Error(ErrorKind::profile, std::move(msg)); }
inline Error analysis_error(std::string msg) { return Error(ErrorKind::analysis, std::move(msg)); }
inline Error io_error(std::string msg) { return Error(ErrorKind::io, std::move(msg)); }

} // namespace mtb
