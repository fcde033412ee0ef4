#pragma once

#include <random>

#include "docgraph/types.hpp"

namespace docgraph::testsupport {

// Deterministic helpers; std::uniform_int_distribution is implementation
// defined, so tests roll their own.
int rand_int(std::mt19937& rng, int lo, int hi);
double rand_real(std::mt19937& rng, double lo, double hi);

struct PageGenOptions {
  int min_boxes = 0;
  int max_boxes = 50;
  double width = 1000.0;
  double height = 1000.0;
  // Assign weighted categories and text with occasional reference markers;
  // otherwise everything is Text without content.
  bool with_content = false;
};

// Non-overlapping integer-coordinate boxes placed by rejection sampling.
// Boxes may share edges; the achieved count can fall short of the target on
// crowded pages.
Page random_layout_page(std::mt19937& rng, int page_id, const PageGenOptions& options = {});

// Detector-style output for `gt`: jittered scored copies of most instances
// (mostly same category), occasional duplicates, and a few spurious boxes.
Page random_prediction_page(const Page& gt, std::mt19937& rng);

// Prediction graph for an annotated ground-truth page: scored jittered
// instances plus a scored subset of the ground-truth edges and noise edges.
Page random_prediction_graph(const Page& annotated_gt, std::mt19937& rng);

}  // namespace docgraph::testsupport
