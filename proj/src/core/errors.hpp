#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace becmirror {

// Base for all library errors so callers can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Fixed-point or root polishing failed; carries the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double last, double residual, int iterations)
      : Error(msg), last_iterate(last), residual(residual), iterations(iterations) {}
  double last_iterate;
  double residual;
  int iterations;
};

// Root bracket does not straddle a sign change; carries sampled residuals.
class BracketError : public Error {
 public:
  BracketError(const std::string& msg, std::vector<std::pair<double, double>> samples)
      : Error(msg), sampled_residuals(std::move(samples)) {}
  std::vector<std::pair<double, double>> sampled_residuals;
};

class SizeError : public Error {
 public:
  explicit SizeError(const std::string& msg) : Error(msg) {}
};

class GridError : public Error {
 public:
  explicit GridError(const std::string& msg) : Error(msg) {}
};

// ODE state exceeded the divergence guard.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& msg, double t) : Error(msg), time(t) {}
  double time;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace becmirror
