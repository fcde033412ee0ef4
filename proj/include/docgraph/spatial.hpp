#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "docgraph/types.hpp"

namespace docgraph {

// Nearest neighbor of `subject` in one direction. `edge_distance` is the gap
// between the facing edges, 0 when the boxes abut.
struct DirectionalNeighbor {
  int subject = 0;
  RelationType direction = RelationType::Up;
  int object = 0;
  double edge_distance = 0.0;
};

enum class LayoutClass { Manhattan, NonManhattan };

std::string_view to_string(LayoutClass layout_class);

// Among instances whose perpendicular interval overlaps the subject's with
// positive length (x-interval for Up/Down, y-interval for Left/Right) and
// which lie on the given side, returns the one with minimal facing-edge
// distance. Ties go to the larger perpendicular overlap, then the lower id.
// Throws std::invalid_argument for a non-spatial direction.
std::optional<DirectionalNeighbor> nearest_in_direction(const LayoutInstance& subject,
                                                        const Page& page,
                                                        RelationType direction);

// One edge per (subject, direction) with a nearest neighbor; the edge type is
// the direction, meaning "object lies in that direction from subject".
// Throws ValidationError when the page violates its invariants.
std::vector<RelationEdge> extract_spatial(const Page& page);

// Manhattan iff recursive axis-aligned whitespace cuts separate the page into
// single-instance regions (the zero-gap X-Y cut ends in singleton leaves).
LayoutClass classify_layout(const Page& page);

}  // namespace docgraph
