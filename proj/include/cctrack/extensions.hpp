#pragma once

#include <string>

namespace cctrack {

/// Language extensions enabled for a program.
struct Extensions {
  bool returns = false;
  bool regions = false;
  bool effects = false;

  bool any() const { return returns || regions || effects; }
  static Extensions none() { return {}; }
  static Extensions all() { return {true, true, true}; }

  /// Parses a comma-separated list such as "returns,regions". Returns false on an unknown name.
  static bool parse(const std::string& list, Extensions& out, std::string* bad = nullptr);
  std::string str() const;

  friend bool operator==(const Extensions&, const Extensions&) = default;
};

}  // namespace cctrack
