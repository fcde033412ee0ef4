#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "docgraph/types.hpp"

namespace docgraph {

enum class ViolationKind {
  InvalidPageSize,
  InvalidBox,
  OutOfBounds,
  DuplicateInstanceId,
  Overlap,
  SelfRelation,
  DanglingEndpoint,
  DuplicateRelation,
  ScoreOutOfRange,
  MissingScore,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<int> ids;  // offending instance ids (subject, object for edges)
  std::string detail;
};

struct ValidationReport {
  int page_id = 0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

// Checks every page-level invariant: positive page size, boxes valid and
// on-page, unique ids, no positive-area box overlap, edges resolving to
// on-page instances, no self edges, unique (subject, object, rel) triples,
// scores inside [0, 1]. Violations are data; the page is never modified.
ValidationReport validate_page(const Page& page);

// Profile for detector output: box overlap is allowed (detectors emit
// overlapping candidates), but every instance and relation must be scored.
ValidationReport validate_prediction_page(const Page& page);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationReport> reports);

  const std::vector<ValidationReport>& reports() const { return reports_; }

 private:
  std::vector<ValidationReport> reports_;
};

}  // namespace docgraph
