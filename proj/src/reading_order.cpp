#include "docgraph/reading_order.hpp"

#include <algorithm>
#include <tuple>

namespace docgraph {

namespace {

struct Item {
  int id;
  BoundingBox box;
};

struct Group {
  std::vector<Item> items;
  double lo;  // region bounds along the cut axis
  double hi;
};

// Sweeps the projection intervals along one axis and splits at every
// whitespace band strictly wider than min_gap. Returns one group when no
// band qualifies. Cut positions are gap midpoints, so child regions tile the
// parent region.
std::vector<Group> split_axis(const std::vector<Item>& items, bool y_axis, double min_gap,
                              double region_lo, double region_hi) {
  std::vector<Item> sorted = items;
  std::sort(sorted.begin(), sorted.end(), [y_axis](const Item& a, const Item& b) {
    const double a_lo = y_axis ? a.box.top() : a.box.left();
    const double b_lo = y_axis ? b.box.top() : b.box.left();
    return std::tie(a_lo, a.id) < std::tie(b_lo, b.id);
  });

  std::vector<Group> groups;
  Group current{{}, region_lo, 0.0};
  double covered_hi = 0.0;
  for (const Item& item : sorted) {
    const double lo = y_axis ? item.box.top() : item.box.left();
    const double hi = y_axis ? item.box.bottom() : item.box.right();
    if (!current.items.empty() && lo - covered_hi > min_gap) {
      const double cut = covered_hi + (lo - covered_hi) / 2.0;
      current.hi = cut;
      groups.push_back(std::move(current));
      current = Group{{}, cut, 0.0};
    }
    covered_hi = current.items.empty() ? hi : std::max(covered_hi, hi);
    current.items.push_back(item);
  }
  if (!current.items.empty()) {
    current.hi = region_hi;
    groups.push_back(std::move(current));
  }
  return groups;
}

CutTree build_node(const std::vector<Item>& items, const BoundingBox& region, double min_gap) {
  CutTree node;
  node.region = region;

  if (items.size() <= 1) {
    node.kind = CutTree::Kind::Leaf;
    for (const Item& item : items) {
      node.instance_ids.push_back(item.id);
    }
    return node;
  }

  // Horizontal whitespace bands first, vertical ones only when none qualify.
  std::vector<Group> groups = split_axis(items, /*y_axis=*/true, min_gap,
                                         region.top(), region.bottom());
  if (groups.size() > 1) {
    node.kind = CutTree::Kind::YCut;
    for (const Group& group : groups) {
      const BoundingBox sub{region.x, group.lo, region.w, group.hi - group.lo};
      node.children.push_back(build_node(group.items, sub, min_gap));
    }
    return node;
  }

  groups = split_axis(items, /*y_axis=*/false, min_gap, region.left(), region.right());
  if (groups.size() > 1) {
    node.kind = CutTree::Kind::XCut;
    for (const Group& group : groups) {
      const BoundingBox sub{group.lo, region.y, group.hi - group.lo, region.h};
      node.children.push_back(build_node(group.items, sub, min_gap));
    }
    return node;
  }

  node.kind = CutTree::Kind::Leaf;
  std::vector<Item> ordered = items;
  std::sort(ordered.begin(), ordered.end(), [](const Item& a, const Item& b) {
    return std::tie(a.box.y, a.box.x, a.id) < std::tie(b.box.y, b.box.x, b.id);
  });
  for (const Item& item : ordered) {
    node.instance_ids.push_back(item.id);
  }
  return node;
}

void collect_order(const CutTree& node, std::vector<int>& out) {
  if (node.kind == CutTree::Kind::Leaf) {
    out.insert(out.end(), node.instance_ids.begin(), node.instance_ids.end());
    return;
  }
  for (const CutTree& child : node.children) {
    collect_order(child, out);
  }
}

}  // namespace

CutTree xy_cut(const Page& page, double min_gap) {
  min_gap = std::max(min_gap, 0.0);
  std::vector<Item> items;
  items.reserve(page.instances.size());
  for (const LayoutInstance& instance : page.instances) {
    items.push_back({instance.id, instance.bbox});
  }
  return build_node(items, BoundingBox{0.0, 0.0, page.width, page.height}, min_gap);
}

ReadingOrder reading_order(const Page& page, double min_gap) {
  ReadingOrder result;
  collect_order(xy_cut(page, min_gap), result.order);
  return result;
}

}  // namespace docgraph
