#pragma once

#include <stdexcept>
#include <string>

namespace indoorbev {

/// Invalid configuration or arguments supplied by the caller.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or missing input data (files, labels, predictions).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Procedural scene placement ran out of retries.
class PlacementError : public std::runtime_error {
 public:
  PlacementError(std::string class_name, int class_id)
      : std::runtime_error("could not place object of class '" + class_name +
                           "' (id " + std::to_string(class_id) +
                           ") within the retry budget"),
        class_name_(std::move(class_name)),
        class_id_(class_id) {}

  const std::string& class_name() const noexcept { return class_name_; }
  int class_id() const noexcept { return class_id_; }

 private:
  std::string class_name_;
  int class_id_;
};

}  // namespace indoorbev
