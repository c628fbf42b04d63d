#pragma once

#include <stdexcept>
#include <string>

namespace cdrodeo {

struct DimensionMismatch : std::invalid_argument
{
  explicit DimensionMismatch(const std::string& msg)
    : std::invalid_argument(msg)
  {}
};

struct InvalidInput : std::invalid_argument
{
  explicit InvalidInput(const std::string& msg)
    : std::invalid_argument(msg)
  {}
};

struct MissingAuxSample : std::invalid_argument
{
  explicit MissingAuxSample(const std::string& msg)
    : std::invalid_argument(msg)
  {}
};

//! Quadrature (or another iterative scheme) failed to reach its tolerance.
struct NonConvergence : std::runtime_error
{
  explicit NonConvergence(const std::string& msg)
    : std::runtime_error(msg)
  {}
};

//! A NaN/Inf showed up where the algorithm requires finite values.
struct NumericalFailure : std::runtime_error
{
  explicit NumericalFailure(const std::string& msg)
    : std::runtime_error(msg)
  {}
};

} // namespace cdrodeo
