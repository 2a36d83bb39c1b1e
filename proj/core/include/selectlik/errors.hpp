#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace selectlik {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The rejection sampler exhausted its per-study attempt budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::size_t study_index, std::size_t attempts)
      : Error("rejection budget of " + std::to_string(attempts) +
              " attempts exhausted for study " + std::to_string(study_index)),
        study_index_(study_index),
        attempts_(attempts) {}

  std::size_t study_index() const noexcept { return study_index_; }
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  std::size_t study_index_;
  std::size_t attempts_;
};

/// A probability mass is too small to represent in double precision.
class Underflow : public Error {
 public:
  using Error::Error;
};

/// The likelihood surface has no ridge to measure.
class NoRidge : public Error {
 public:
  using Error::Error;
};

/// Most of the posterior mass sits on the boundary of the quadrature grid.
class GridTooSmall : public Error {
 public:
  using Error::Error;
};

}  // namespace selectlik
