#pragma once

#include <stdexcept>
#include <string>

namespace ghostbeam {

// Error categories map onto process exit codes in the CLI:
// config/usage -> 2, geometry -> 3, numerical quality -> 4.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitGeometry = 3;
inline constexpr int kExitNumerical = 4;

}  // namespace ghostbeam
