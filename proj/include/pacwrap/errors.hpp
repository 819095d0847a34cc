#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pacwrap {

// Root of every recoverable failure raised by the library. Precondition
// violations on pure math routines use std::domain_error instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScoreClass { Normal, Anomaly };

inline const char* class_name(ScoreClass c) {
  return c == ScoreClass::Normal ? "normal" : "anomaly";
}

// Calibration sample is too small for the requested (eps, delta).
class InsufficientCalibration : public Error {
 public:
  InsufficientCalibration(ScoreClass side, std::size_t have, std::size_t need)
      : Error("need ≥ " + std::to_string(need) + " " + class_name(side) +
              " samples (have " + std::to_string(have) + ")"),
        side_(side),
        have_(have),
        need_(need) {}

  ScoreClass side() const { return side_; }
  std::size_t have() const { return have_; }
  std::size_t need() const { return need_; }

 private:
  ScoreClass side_;
  std::size_t have_;
  std::size_t need_;
};

class NonFiniteScore : public Error {
 public:
  explicit NonFiniteScore(std::size_t index)
      : Error("non-finite score at index " + std::to_string(index)), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class OrderingViolation : public Error {
 public:
  using Error::Error;
};

class OutOfInterval : public Error {
 public:
  using Error::Error;
};

class ModeUnavailable : public Error {
 public:
  using Error::Error;
};

// Malformed input file; line is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pacwrap
