#pragma once

#include <stdexcept>
#include <string>

namespace tdpa {

/// Bad input data or configuration. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tdpa
