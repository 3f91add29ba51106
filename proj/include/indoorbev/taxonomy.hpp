#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace indoorbev {

/// Foreground class names. Class ids index into `names`; the background
/// class is appended implicitly at index `size()`.
struct Taxonomy {
  std::vector<std::string> names;

  static Taxonomy indoor_default() {
    return {{"Person", "Table", "Chair", "Shelf", "Box", "Robot", "Wall",
             "Misc"}};
  }

  int foreground_count() const { return static_cast<int>(names.size()); }
  int background_index() const { return foreground_count(); }
  /// Foreground classes plus background.
  int class_count() const { return foreground_count() + 1; }

  bool valid_id(int id) const { return id >= 0 && id < foreground_count(); }

  std::optional<int> find(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return static_cast<int>(i);
    }
    return std::nullopt;
  }

  std::string name_of(int id) const {
    return valid_id(id) ? names[static_cast<std::size_t>(id)]
                        : "class" + std::to_string(id);
  }
};

}  // namespace indoorbev
