#pragma once

#include <stdexcept>
#include <string>

namespace glare {

// Invalid configuration or arguments (bad combo id, shape mismatch, ...).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A file or directory that was asked for does not exist or cannot be opened.
class InputError : public std::runtime_error {
public:
  InputError(const std::string& what, std::string path)
      : std::runtime_error(what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

// Dataset structure problems: orphan images/masks, duplicate ids, empty roots.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// File exists but its contents cannot be decoded.
class DecodeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace glare
