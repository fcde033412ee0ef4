#pragma once

#include <vector>

#include "docgraph/types.hpp"

namespace docgraph {

// Result of the recursive X-Y cut. Cut nodes hold ordered children (YCut
// top-to-bottom, XCut left-to-right); leaves hold instance ids. Regions
// partition the page rectangle; leaf id sets partition the page's instances.
struct CutTree {
  enum class Kind { XCut, YCut, Leaf };

  Kind kind = Kind::Leaf;
  BoundingBox region;
  std::vector<CutTree> children;
  std::vector<int> instance_ids;  // leaves only
};

struct ReadingOrder {
  std::vector<int> order;  // a permutation of the page's instance ids
};

// Recursively splits the instance set at whitespace bands wider than
// `min_gap`, preferring y-axis (horizontal band) cuts and splitting at every
// qualifying gap of the chosen axis. Recursion stops when neither axis has a
// qualifying gap; leaves may then hold more than one instance.
CutTree xy_cut(const Page& page, double min_gap = 0.0);

// Depth-first traversal of the cut tree: YCut children top-to-bottom, XCut
// children left-to-right (a full left column is read before the right one).
// Instances inside a multi-instance leaf are ordered by (top y, left x, id).
ReadingOrder reading_order(const Page& page, double min_gap = 0.0);

}  // namespace docgraph
