#pragma once

#include <stdexcept>
#include <string>

namespace xhodge {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid domain description: obstacle outside the box, grid too coarse, bad radii.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition (mismatched topologies, non-finite input,
/// non-orthogonal right-hand side).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or field file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace xhodge
