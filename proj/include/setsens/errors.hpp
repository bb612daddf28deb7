#pragma once

#include <stdexcept>
#include <string>

namespace setsens {

// Malformed study description (unknown key, out-of-range value).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// All output sets coincide on the inner sample, so the set kernel has no
// usable bandwidth.
class DegenerateOutputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The total HSIC estimate is numerically zero; indices are undefined.
class NonInformativeOutputError : public std::runtime_error {
public:
  NonInformativeOutputError() : std::runtime_error("non-informative output") {}
};

}  // namespace setsens
