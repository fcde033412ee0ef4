#pragma once

#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "docgraph/reading_order.hpp"
#include "docgraph/types.hpp"

namespace docgraph {

// Role of a category inside the logical structure:
//   Structural        — Section-header, Text, Formula, List-item
//   NonTextualContent — Table, Picture, Caption
//   Unassociated      — Page-header, Page-footer, Title
//   ReferenceOnly     — Footnote
enum class RoleGroup { Structural, NonTextualContent, Unassociated, ReferenceOnly };

std::string_view to_string(RoleGroup group);
RoleGroup role_group(Category category);

std::map<int, RoleGroup> group_roles(const Page& page);

// Pairs each Caption with the nearest Table or Picture by facing-edge gap
// (diagonal candidates use the Euclidean corner gap). Distance ties resolve
// to the container earlier in reading order. Captions with no container on
// the page stay unpaired. Result is ordered by caption reading order.
std::vector<std::pair<int, int>> associate_captions(const Page& page,
                                                    const ReadingOrder& order);
std::vector<std::pair<int, int>> associate_captions(const Page& page);

// Logical forest over the Structural and NonTextualContent instances.
// Unassociated and Footnote instances never appear, neither as parent nor as
// child nor in the root list.
struct HierarchyForest {
  std::map<int, int> parent_of;  // child id -> parent id
  std::vector<int> roots;        // parentless members, in reading order

  // parent id -> child ids (ascending id); derived view of parent_of
  std::map<int, std::vector<int>> children() const;
};

// Section-headers are flat peers. Text/Formula/List-item attach to the last
// Section-header before them in reading order (rootless before the first).
// Captions attach to their associated container; Table/Picture units attach
// to the section containing the combined caption+container reading position.
HierarchyForest build_hierarchy(const Page& page, const ReadingOrder& order);
HierarchyForest build_hierarchy(const Page& page, const ReadingOrder& order,
                                const std::vector<std::pair<int, int>>& captions);

}  // namespace docgraph
