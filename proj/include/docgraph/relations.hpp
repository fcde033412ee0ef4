#pragma once

#include <string>
#include <vector>

#include "docgraph/hierarchy.hpp"
#include "docgraph/types.hpp"

namespace docgraph {

enum class ReferenceKind { TableRef, FigureRef, FootnoteRef };

std::string_view to_string(ReferenceKind kind);

// Case-insensitive regex matched against instance text. For TableRef and
// FigureRef the ordinal capture group must parse as a positive integer; for
// FootnoteRef it captures the marker token at the start of a Footnote text.
struct ReferencePattern {
  ReferenceKind kind = ReferenceKind::TableRef;
  std::string pattern;
  int ordinal_group = 1;
};

// Table/Tab. n, Figure/Fig. n, and leading footnote markers (number or one
// of * † ‡).
std::vector<ReferencePattern> default_reference_patterns();

// One pattern per line: kind<TAB>pattern[<TAB>capture-group]; kind is one of
// table, figure, footnote. Blank lines and lines starting with # are skipped.
std::vector<ReferencePattern> load_reference_patterns(const std::string& path);

// For every child->parent entry emits (parent, Parent, child) and
// (child, Child, parent).
std::vector<RelationEdge> emit_parent_child(const HierarchyForest& forest);

// Consecutive siblings in reading order get a Sequence edge; the root set
// forms one sibling group of its own. Chains never cross sibling groups.
std::vector<RelationEdge> emit_sequence(const HierarchyForest& forest,
                                        const ReadingOrder& order);

// Links textual mentions ("see Table 1", footnote markers) to the Table,
// Picture, or Footnote they cite. Marker lookup prefers a container whose
// caption carries the marker and falls back to the n-th container of that
// kind in reading order. Caption instances are never reference objects, a
// caption never references its own container, and Unassociated/Footnote
// instances never act as subjects.
std::vector<RelationEdge> emit_references(const Page& page,
                                          const std::vector<std::pair<int, int>>& captions,
                                          const ReadingOrder& order,
                                          const std::vector<ReferencePattern>& patterns);

struct AnnotateConfig {
  double xy_min_gap = 0.0;
  bool spatial = true;
  bool logical = true;
  std::vector<ReferencePattern> patterns = default_reference_patterns();
};

// Full rule pipeline: spatial extraction, reading order, role grouping,
// caption association, hierarchy, parent/child + sequence + reference
// completion. The returned graph carries exactly the computed edges (input
// relations are discarded), deduplicated by (subject, object, rel).
// Throws ValidationError when the page is invalid.
DocumentGraph annotate(const Page& page, const AnnotateConfig& config = {});

}  // namespace docgraph
