#pragma once

#include <stdexcept>
#include <string>

namespace gvpj {

// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind { validation = 1, numerical = 2, io = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Arguments outside a function's mathematical domain or violated preconditions.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

// Carries the best available estimate so callers can decide to accept it.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double best_estimate, double achieved_error)
      : NumericalError(what), best_estimate_(best_estimate), achieved_error_(achieved_error) {}
  double best_estimate() const noexcept { return best_estimate_; }
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double best_estimate_;
  double achieved_error_;
};

class SeriesDivergenceError : public NumericalError {
 public:
  SeriesDivergenceError(const std::string& what, int terms) : NumericalError(what), terms_(terms) {}
  int terms() const noexcept { return terms_; }

 private:
  int terms_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

// Throws DomainError with `what` unless `condition` holds.
void require(bool condition, const std::string& what);

}  // namespace gvpj
