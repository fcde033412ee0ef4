#include "docgraph/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace docgraph {

std::string_view to_string(RoleGroup group) {
  switch (group) {
    case RoleGroup::Structural: return "Structural";
    case RoleGroup::NonTextualContent: return "NonTextualContent";
    case RoleGroup::Unassociated: return "Unassociated";
    case RoleGroup::ReferenceOnly: return "ReferenceOnly";
  }
  return "?";
}

RoleGroup role_group(Category category) {
  switch (category) {
    case Category::SectionHeader:
    case Category::Text:
    case Category::Formula:
    case Category::ListItem:
      return RoleGroup::Structural;
    case Category::Table:
    case Category::Picture:
    case Category::Caption:
      return RoleGroup::NonTextualContent;
    case Category::PageHeader:
    case Category::PageFooter:
    case Category::Title:
      return RoleGroup::Unassociated;
    case Category::Footnote:
      return RoleGroup::ReferenceOnly;
  }
  return RoleGroup::Unassociated;
}

std::map<int, RoleGroup> group_roles(const Page& page) {
  std::map<int, RoleGroup> roles;
  for (const LayoutInstance& instance : page.instances) {
    roles[instance.id] = role_group(instance.category);
  }
  return roles;
}

namespace {

// Gap between two disjoint boxes: the facing-edge distance when they overlap
// on one axis, the Euclidean corner gap otherwise.
double box_gap(const BoundingBox& a, const BoundingBox& b) {
  const double dx = std::max({0.0, b.left() - a.right(), a.left() - b.right()});
  const double dy = std::max({0.0, b.top() - a.bottom(), a.top() - b.bottom()});
  return std::hypot(dx, dy);
}

std::unordered_map<int, std::size_t> order_positions(const ReadingOrder& order) {
  std::unordered_map<int, std::size_t> pos;
  for (std::size_t i = 0; i < order.order.size(); ++i) {
    pos[order.order[i]] = i;
  }
  return pos;
}

}  // namespace

std::vector<std::pair<int, int>> associate_captions(const Page& page,
                                                    const ReadingOrder& order) {
  const auto pos = order_positions(order);

  std::vector<const LayoutInstance*> captions;
  std::vector<const LayoutInstance*> containers;
  for (const LayoutInstance& instance : page.instances) {
    if (instance.category == Category::Caption) {
      captions.push_back(&instance);
    } else if (instance.category == Category::Table || instance.category == Category::Picture) {
      containers.push_back(&instance);
    }
  }
  std::sort(captions.begin(), captions.end(),
            [&pos](const LayoutInstance* a, const LayoutInstance* b) {
              return pos.at(a->id) < pos.at(b->id);
            });

  std::vector<std::pair<int, int>> pairs;
  for (const LayoutInstance* caption : captions) {
    const LayoutInstance* best = nullptr;
    double best_gap = std::numeric_limits<double>::infinity();
    for (const LayoutInstance* container : containers) {
      const double gap = box_gap(caption->bbox, container->bbox);
      if (!best || gap < best_gap ||
          (gap == best_gap && pos.at(container->id) < pos.at(best->id))) {
        best = container;
        best_gap = gap;
      }
    }
    if (best) {
      pairs.emplace_back(caption->id, best->id);
    }
  }
  return pairs;
}

std::vector<std::pair<int, int>> associate_captions(const Page& page) {
  return associate_captions(page, reading_order(page));
}

std::map<int, std::vector<int>> HierarchyForest::children() const {
  std::map<int, std::vector<int>> result;
  for (const auto& [child, parent] : parent_of) {
    result[parent].push_back(child);
  }
  return result;
}

HierarchyForest build_hierarchy(const Page& page, const ReadingOrder& order) {
  return build_hierarchy(page, order, associate_captions(page, order));
}

HierarchyForest build_hierarchy(const Page& page, const ReadingOrder& order,
                                const std::vector<std::pair<int, int>>& captions) {
  const auto pos = order_positions(order);

  std::unordered_map<int, const LayoutInstance*> by_id;
  for (const LayoutInstance& instance : page.instances) {
    by_id[instance.id] = &instance;
  }

  std::unordered_map<int, int> container_of;           // caption -> container
  std::unordered_map<int, std::size_t> unit_position;  // container -> earliest unit position
  for (const LayoutInstance& instance : page.instances) {
    if (instance.category == Category::Table || instance.category == Category::Picture) {
      unit_position[instance.id] = pos.at(instance.id);
    }
  }
  for (const auto& [caption, container] : captions) {
    container_of[caption] = container;
    unit_position[container] = std::min(unit_position[container], pos.at(caption));
  }

  // Section spans: a header owns everything after it up to the next header.
  std::vector<std::pair<std::size_t, int>> headers;  // (position, id)
  for (const LayoutInstance& instance : page.instances) {
    if (instance.category == Category::SectionHeader) {
      headers.emplace_back(pos.at(instance.id), instance.id);
    }
  }
  std::sort(headers.begin(), headers.end());
  const auto section_for = [&headers](std::size_t position) -> std::optional<int> {
    std::optional<int> section;
    for (const auto& [header_pos, header_id] : headers) {
      if (header_pos < position) {
        section = header_id;
      } else {
        break;
      }
    }
    return section;
  };

  HierarchyForest forest;
  const auto attach = [&forest](int child, std::optional<int> parent) {
    if (parent) {
      forest.parent_of[child] = *parent;
    } else {
      forest.roots.push_back(child);
    }
  };

  for (int id : order.order) {
    const LayoutInstance& instance = *by_id.at(id);
    switch (instance.category) {
      case Category::SectionHeader:
        forest.roots.push_back(id);  // flat peers
        break;
      case Category::Text:
      case Category::Formula:
      case Category::ListItem:
        attach(id, section_for(pos.at(id)));
        break;
      case Category::Caption:
        if (auto it = container_of.find(id); it != container_of.end()) {
          forest.parent_of[id] = it->second;
        } else {
          forest.roots.push_back(id);
        }
        break;
      case Category::Table:
      case Category::Picture:
        attach(id, section_for(unit_position.at(id)));
        break;
      default:
        break;  // Unassociated and Footnote stay outside the forest
    }
  }
  return forest;
}

}  // namespace docgraph
