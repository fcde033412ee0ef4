#include "docgraph/spatial.hpp"

#include <algorithm>
#include <stdexcept>

#include "docgraph/reading_order.hpp"
#include "docgraph/validate.hpp"

namespace docgraph {

std::string_view to_string(LayoutClass layout_class) {
  return layout_class == LayoutClass::Manhattan ? "Manhattan" : "NonManhattan";
}

namespace {

double interval_overlap(double a_lo, double a_hi, double b_lo, double b_hi) {
  return std::min(a_hi, b_hi) - std::max(a_lo, b_lo);
}

// Perpendicular overlap and facing-edge gap of `candidate` seen from
// `subject` in `direction`; a negative gap means the candidate sits on the
// wrong side.
struct SideView {
  double overlap;
  double gap;
};

SideView side_view(const BoundingBox& subject, const BoundingBox& candidate,
                   RelationType direction) {
  switch (direction) {
    case RelationType::Up:
      return {interval_overlap(subject.left(), subject.right(), candidate.left(), candidate.right()),
              subject.top() - candidate.bottom()};
    case RelationType::Down:
      return {interval_overlap(subject.left(), subject.right(), candidate.left(), candidate.right()),
              candidate.top() - subject.bottom()};
    case RelationType::Left:
      return {interval_overlap(subject.top(), subject.bottom(), candidate.top(), candidate.bottom()),
              subject.left() - candidate.right()};
    case RelationType::Right:
      return {interval_overlap(subject.top(), subject.bottom(), candidate.top(), candidate.bottom()),
              candidate.left() - subject.right()};
    default:
      throw std::invalid_argument("side_view: direction must be spatial");
  }
}

}  // namespace

std::optional<DirectionalNeighbor> nearest_in_direction(const LayoutInstance& subject,
                                                        const Page& page,
                                                        RelationType direction) {
  if (!is_spatial(direction)) {
    throw std::invalid_argument("nearest_in_direction: direction must be spatial");
  }

  std::optional<DirectionalNeighbor> best;
  double best_overlap = 0.0;
  for (const LayoutInstance& candidate : page.instances) {
    if (candidate.id == subject.id) {
      continue;
    }
    const SideView view = side_view(subject.bbox, candidate.bbox, direction);
    if (view.overlap <= 0.0 || view.gap < 0.0) {
      continue;
    }
    const bool closer =
        !best || view.gap < best->edge_distance ||
        (view.gap == best->edge_distance &&
         (view.overlap > best_overlap ||
          (view.overlap == best_overlap && candidate.id < best->object)));
    if (closer) {
      best = DirectionalNeighbor{subject.id, direction, candidate.id, view.gap};
      best_overlap = view.overlap;
    }
  }
  return best;
}

std::vector<RelationEdge> extract_spatial(const Page& page) {
  ValidationReport report = validate_page(page);
  if (!report.ok()) {
    throw ValidationError({report});
  }

  std::vector<RelationEdge> edges;
  for (const LayoutInstance& subject : page.instances) {
    for (RelationType direction : {RelationType::Up, RelationType::Down,
                                   RelationType::Left, RelationType::Right}) {
      if (auto neighbor = nearest_in_direction(subject, page, direction)) {
        edges.push_back({subject.id, neighbor->object, direction, std::nullopt, std::nullopt});
      }
    }
  }
  return edges;
}

namespace {

bool all_leaves_singular(const CutTree& node) {
  if (node.kind == CutTree::Kind::Leaf) {
    return node.instance_ids.size() <= 1;
  }
  return std::all_of(node.children.begin(), node.children.end(), all_leaves_singular);
}

}  // namespace

LayoutClass classify_layout(const Page& page) {
  return all_leaves_singular(xy_cut(page, 0.0)) ? LayoutClass::Manhattan
                                                : LayoutClass::NonManhattan;
}

}  // namespace docgraph
