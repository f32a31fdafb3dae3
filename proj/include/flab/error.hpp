#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flab {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankMismatch : public Error {
 public:
  RankMismatch(int a, int b)
      : Error("free group rank mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class SizeGuard : public Error {
 public:
  using Error::Error;
};

class ZeroKernel : public Error {
 public:
  ZeroKernel() : Error("convolution kernel is zero") {}
};

/// A window projection could not be certified within the configured cap.
class Uncertified : public Error {
 public:
  using Error::Error;
};

/// The preimage induction could not find a fresh extreme point.
class OrderingFailure : public Error {
 public:
  OrderingFailure(std::size_t step, const std::string& what)
      : Error("ordering condition fails at step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace flab
