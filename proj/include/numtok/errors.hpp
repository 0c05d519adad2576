#pragma once

#include <stdexcept>
#include <string>

namespace numtok {

// Error categories map to CLI exit codes; see tools/numtok.cpp.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed on-disk artifacts (vocabulary files, datasets, results).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

class BackendError : public std::runtime_error {
 public:
  explicit BackendError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace numtok
