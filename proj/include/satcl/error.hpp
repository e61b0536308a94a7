#pragma once

#include <stdexcept>
#include <string>

namespace satcl {

/// Root of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed region: zero normal, negative radius, dimension mismatch.
class InvalidRegion : public Error {
 public:
  using Error::Error;
};

/// An operation that needs a point was handed an empty region.
class InfeasibleRegion : public Error {
 public:
  using Error::Error;
};

/// Inconsistent task, criterion or parameter dimensions; unparsable input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// MeanAbs task with more atoms than the sign-pattern cap.
class TaskTooLarge : public Error {
 public:
  using Error::Error;
};

/// Algorithm reads raw atoms, so it has no region-only counterpart.
class NotLiftable : public Error {
 public:
  using Error::Error;
};

/// Arrangement exceeds the enumeration caps.
class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

/// Stream specification that cannot be generated.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// Sat_{1:t} became empty during a CL run.
class Infeasible : public Error {
 public:
  explicit Infeasible(std::size_t t, const std::string& why = "empty intersection of satisfaction regions")
      : Error("infeasible at t=" + std::to_string(t) + ": " + why), t_(t) {}
  std::size_t t() const noexcept { return t_; }

 private:
  std::size_t t_;
};

}  // namespace satcl
