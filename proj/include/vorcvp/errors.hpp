#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vorcvp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed files, singular bases, bad parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

// A configured dimension or enumeration cap would be exceeded.
class SizeError : public Error {
 public:
  using Error::Error;
};

// A documented precondition or internal invariant was violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Non-generic input: several facets are hit at the same exit time.
class TieDetected : public Error {
 public:
  TieDetected(std::vector<std::size_t> tied, std::string alpha)
      : Error("tie among exit facets at alpha=" + alpha),
        tied_(std::move(tied)),
        alpha_(std::move(alpha)) {}

  // Indices into the VR list of the facets that attain the minimum.
  const std::vector<std::size_t>& tied() const noexcept { return tied_; }
  const std::string& alpha() const noexcept { return alpha_; }

 private:
  std::vector<std::size_t> tied_;
  std::string alpha_;
};

// The solver gave up after the configured number of restarts.
class RestartCapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace vorcvp
