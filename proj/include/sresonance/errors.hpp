#pragma once

#include <stdexcept>
#include <string>

namespace sres {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Root bracket whose endpoint values share a sign.
class BadBracket : public Error {
 public:
  using Error::Error;
};

/// An objective or integrand produced NaN or an infinity.
class NonFinite : public Error {
 public:
  using Error::Error;
};

/// The diffusion does not pass the ergodicity checks (C2)/(C3).
class NotErgodic : public Error {
 public:
  using Error::Error;
};

/// Observation on the boundary of its range (time fraction 0 or 1, zero energy).
class DegenerateObservation : public Error {
 public:
  using Error::Error;
};

/// Observed statistic outside the range of the forward map.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Euler-Maruyama path left the representable region.
class NumericBlowup : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied parameters or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sres
