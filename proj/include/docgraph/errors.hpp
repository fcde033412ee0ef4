#pragma once

#include <stdexcept>
#include <string>

namespace docgraph {

// Malformed input document: unparseable JSON, missing field, unknown label.
// `location` points at the offending element, e.g. "pages[2].instances[7]".
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string location, const std::string& message)
      : std::runtime_error(location + ": " + message), location_(std::move(location)) {}

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace docgraph
