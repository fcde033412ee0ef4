#include "docgraph/validate.hpp"

#include <set>
#include <sstream>
#include <tuple>
#include <utility>

namespace docgraph {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::InvalidPageSize: return "invalid page size";
    case ViolationKind::InvalidBox: return "invalid box";
    case ViolationKind::OutOfBounds: return "out of bounds";
    case ViolationKind::DuplicateInstanceId: return "duplicate instance id";
    case ViolationKind::Overlap: return "overlap";
    case ViolationKind::SelfRelation: return "self relation";
    case ViolationKind::DanglingEndpoint: return "dangling endpoint";
    case ViolationKind::DuplicateRelation: return "duplicate relation";
    case ViolationKind::ScoreOutOfRange: return "score out of range";
    case ViolationKind::MissingScore: return "missing score";
  }
  return "?";
}

namespace {

bool boxes_overlap(const BoundingBox& a, const BoundingBox& b) {
  // Positive-area intersection; shared edges and corners are fine.
  return std::min(a.right(), b.right()) > std::max(a.left(), b.left()) &&
         std::min(a.bottom(), b.bottom()) > std::max(a.top(), b.top());
}

bool score_in_range(const std::optional<double>& score) {
  return !score || (*score >= 0.0 && *score <= 1.0);
}

void check_structure(const Page& page, ValidationReport& report, bool check_overlap) {
  if (page.width <= 0.0 || page.height <= 0.0) {
    report.violations.push_back({ViolationKind::InvalidPageSize, {},
                                 "page width and height must be positive"});
  }

  std::set<int> seen_ids;
  std::set<int> duplicate_ids;
  for (const LayoutInstance& instance : page.instances) {
    const BoundingBox& b = instance.bbox;
    if (b.w <= 0.0 || b.h <= 0.0) {
      report.violations.push_back({ViolationKind::InvalidBox, {instance.id},
                                   "box width and height must be positive"});
    } else if (b.x < 0.0 || b.y < 0.0 || b.right() > page.width || b.bottom() > page.height) {
      report.violations.push_back({ViolationKind::OutOfBounds, {instance.id},
                                   "box extends beyond the page"});
    }
    if (!score_in_range(instance.score)) {
      report.violations.push_back({ViolationKind::ScoreOutOfRange, {instance.id},
                                   "instance score outside [0, 1]"});
    }
    if (!seen_ids.insert(instance.id).second && duplicate_ids.insert(instance.id).second) {
      report.violations.push_back({ViolationKind::DuplicateInstanceId, {instance.id},
                                   "instance id used more than once"});
    }
  }

  if (check_overlap) {
    for (std::size_t i = 0; i < page.instances.size(); ++i) {
      for (std::size_t j = i + 1; j < page.instances.size(); ++j) {
        const LayoutInstance& a = page.instances[i];
        const LayoutInstance& b = page.instances[j];
        if (boxes_overlap(a.bbox, b.bbox)) {
          report.violations.push_back({ViolationKind::Overlap, {a.id, b.id},
                                       "boxes intersect with positive area"});
        }
      }
    }
  }

  std::set<std::tuple<int, int, RelationType>> seen_edges;
  for (const RelationEdge& edge : page.relations) {
    if (edge.subject == edge.object) {
      report.violations.push_back({ViolationKind::SelfRelation, {edge.subject},
                                   "relation subject equals object"});
    }
    for (int endpoint : {edge.subject, edge.object}) {
      if (!seen_ids.contains(endpoint)) {
        std::ostringstream what;
        what << "relation endpoint " << endpoint << " is not an instance of this page";
        report.violations.push_back({ViolationKind::DanglingEndpoint,
                                     {edge.subject, edge.object}, what.str()});
      }
    }
    if (!seen_edges.insert({edge.subject, edge.object, edge.rel}).second) {
      std::ostringstream what;
      what << "duplicate (" << edge.subject << ", " << to_string(edge.rel) << ", "
           << edge.object << ")";
      report.violations.push_back({ViolationKind::DuplicateRelation,
                                   {edge.subject, edge.object}, what.str()});
    }
    if (!score_in_range(edge.score) || !score_in_range(edge.existence)) {
      report.violations.push_back({ViolationKind::ScoreOutOfRange,
                                   {edge.subject, edge.object},
                                   "relation score outside [0, 1]"});
    }
  }
}

}  // namespace

ValidationReport validate_page(const Page& page) {
  ValidationReport report{page.id, {}};
  check_structure(page, report, /*check_overlap=*/true);
  return report;
}

ValidationReport validate_prediction_page(const Page& page) {
  ValidationReport report{page.id, {}};
  check_structure(page, report, /*check_overlap=*/false);
  for (const LayoutInstance& instance : page.instances) {
    if (!instance.score) {
      report.violations.push_back({ViolationKind::MissingScore, {instance.id},
                                   "predicted instance without score"});
    }
  }
  for (const RelationEdge& edge : page.relations) {
    if (!edge.score) {
      report.violations.push_back({ViolationKind::MissingScore,
                                   {edge.subject, edge.object},
                                   "predicted relation without score"});
    }
  }
  return report;
}

namespace {

std::string describe(const std::vector<ValidationReport>& reports) {
  std::ostringstream what;
  what << "validation failed on " << reports.size() << " page(s):";
  for (const ValidationReport& report : reports) {
    what << " page " << report.page_id << " (" << report.violations.size() << " violation(s))";
  }
  return what.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<ValidationReport> reports)
    : std::runtime_error(describe(reports)), reports_(std::move(reports)) {}

}  // namespace docgraph
