#pragma once

#include <stdexcept>
#include <string>

namespace spa {

// Invalid arguments to a library operation.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid experiment configuration; `what()` names the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spa
