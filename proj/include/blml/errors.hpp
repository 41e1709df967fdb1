#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace blml {

//! Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Invalid input: non-finite values, mismatched dimensions, violated
//! preconditions.
class DomainError : public Error
{
public:
  using Error::Error;
};

//! A request the library declines to run (exponential enumeration, too few
//! events, ...).
class RefusalError : public Error
{
public:
  using Error::Error;
};

//! Bad user configuration (CLI flags, sweep settings).
class ConfigError : public Error
{
public:
  using Error::Error;
};

//! Malformed input file. `line()` is 1-based, 0 when unknown.
class ParseError : public Error
{
public:
  ParseError(const std::string& what, std::size_t line)
    : Error(line ? what + " (line " + std::to_string(line) + ")" : what)
    , line_(line)
  {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

//! Newton iteration failed. Carries the best iterate seen and its residual.
class ConvergenceError : public Error
{
public:
  ConvergenceError(const std::string& what,
                   std::vector<double> best_iterate,
                   double best_residual,
                   int iterations)
    : Error(what + " (residual " + std::to_string(best_residual) +
            ", iterations " + std::to_string(iterations) + ")")
    , best_iterate_(std::move(best_iterate))
    , best_residual_(best_residual)
    , iterations_(iterations)
  {}

  const std::vector<double>& best_iterate() const noexcept
  {
    return best_iterate_;
  }
  double best_residual() const noexcept { return best_residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  std::vector<double> best_iterate_;
  double best_residual_;
  int iterations_;
};

} // namespace blml
