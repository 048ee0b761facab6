#pragma once

#include <stdexcept>
#include <string>

namespace ufprog {

// Exit codes used by the CLI driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or usage: unmapped column, digest mismatch, invalid flag.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data cannot be processed: empty file, no failed runs, empty library.
class DataError : public Error {
 public:
  using Error::Error;
};

// Broken internal contract; indicates a bug, not an operator mistake.
class InternalError : public Error {
 public:
  using Error::Error;
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return kExitUsage;
  if (dynamic_cast<const DataError*>(&e) != nullptr) return kExitData;
  return kExitInternal;
}

}  // namespace ufprog
