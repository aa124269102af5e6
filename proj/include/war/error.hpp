#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace war {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, invalid configuration, schema violations.
class config_error : public error {
 public:
  using error::error;
};

class io_error : public error {
 public:
  using error::error;
};

// Runtime numerical failure: NaN loss, singular matrix, diverged training.
class numeric_error : public error {
 public:
  using error::error;
};

inline std::string shape_to_string(const std::vector<int>& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

class shape_error : public error {
 public:
  shape_error(const std::string& op, const std::vector<std::vector<int>>& shapes)
      : error(format(op, shapes)) {}

 private:
  static std::string format(const std::string& op,
                            const std::vector<std::vector<int>>& shapes) {
    std::string msg = op + ": incompatible shapes";
    for (const auto& s : shapes) msg += " " + shape_to_string(s);
    return msg;
  }
};

}  // namespace war
