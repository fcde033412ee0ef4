#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "docgraph/dataset.hpp"
#include "docgraph/errors.hpp"
#include "docgraph/relations.hpp"
#include "docgraph/validate.hpp"
#include "doctest.h"
#include "synthetic.hpp"

using namespace docgraph;
namespace ts = docgraph::testsupport;

namespace {

struct StackBuilder {
  Page page;
  int next_id = 0;
  double y = 0;

  StackBuilder() {
    page.width = 1000;
    page.height = 2000;
  }

  int add_row(Category category, std::optional<std::string> text = std::nullopt) {
    LayoutInstance instance;
    instance.id = next_id++;
    instance.category = category;
    instance.bbox = {0, y, 900, 40};
    instance.text = std::move(text);
    y += 50;
    page.instances.push_back(std::move(instance));
    return instance.id;
  }
};

using EdgeKey = std::tuple<int, RelationType, int>;

std::set<EdgeKey> edge_set(const std::vector<RelationEdge>& edges) {
  std::set<EdgeKey> keys;
  for (const RelationEdge& edge : edges) {
    keys.insert({edge.subject, edge.rel, edge.object});
  }
  return keys;
}

std::size_t count_type(const std::vector<RelationEdge>& edges, RelationType rel) {
  return std::count_if(edges.begin(), edges.end(),
                       [rel](const RelationEdge& edge) { return edge.rel == rel; });
}

}  // namespace

TEST_SUITE_BEGIN("relations");

TEST_CASE("parent/child emission") {
  SUBCASE("empty forest") {
    CHECK(emit_parent_child(HierarchyForest{}).empty());
  }
  SUBCASE("single link gives one Parent and one Child edge") {
    HierarchyForest forest;
    forest.parent_of[1] = 0;
    const auto edges = emit_parent_child(forest);
    CHECK(edge_set(edges) == std::set<EdgeKey>{{0, RelationType::Parent, 1},
                                               {1, RelationType::Child, 0}});
  }
  SUBCASE("four links give eight edges") {
    HierarchyForest forest;  // S=0, T1=1, T2=2, P=3, C=4
    forest.parent_of[1] = 0;
    forest.parent_of[2] = 0;
    forest.parent_of[4] = 3;
    forest.parent_of[3] = 0;
    const auto edges = emit_parent_child(forest);
    CHECK(edges.size() == 8);
    CHECK(count_type(edges, RelationType::Parent) == 4);
    CHECK(count_type(edges, RelationType::Child) == 4);
  }
}

TEST_CASE("sequence emission") {
  const ReadingOrder order{{0, 1, 2, 3, 4}};
  SUBCASE("single child has no sequence edge") {
    HierarchyForest forest;
    forest.parent_of[1] = 0;
    forest.roots = {0};
    CHECK(emit_sequence(forest, order).empty());
  }
  SUBCASE("three children chain in reading order") {
    HierarchyForest forest;
    forest.parent_of[1] = 0;
    forest.parent_of[2] = 0;
    forest.parent_of[3] = 0;
    forest.roots = {0};
    const auto edges = emit_sequence(forest, order);
    CHECK(edge_set(edges) == std::set<EdgeKey>{{1, RelationType::Sequence, 2},
                                               {2, RelationType::Sequence, 3}});
  }
  SUBCASE("two nested sibling groups chain independently") {
    HierarchyForest forest;  // root 0 -> {1, 2}; 1 -> {3, 4}
    forest.parent_of[1] = 0;
    forest.parent_of[2] = 0;
    forest.parent_of[3] = 1;
    forest.parent_of[4] = 1;
    forest.roots = {0};
    const auto edges = emit_sequence(forest, order);
    CHECK(edge_set(edges) == std::set<EdgeKey>{{1, RelationType::Sequence, 2},
                                               {3, RelationType::Sequence, 4}});
  }
  SUBCASE("roots form one sibling group") {
    HierarchyForest forest;
    forest.roots = {2, 0, 4};  // reading order 0 < 2 < 4
    const auto edges = emit_sequence(forest, order);
    CHECK(edge_set(edges) == std::set<EdgeKey>{{0, RelationType::Sequence, 2},
                                               {2, RelationType::Sequence, 4}});
  }
}

TEST_CASE("references resolve through caption markers") {
  StackBuilder b;
  const int text = b.add_row(Category::Text, "Results are compared, see Table 1.");
  const int table = b.add_row(Category::Table);
  b.add_row(Category::Caption, "Table 1: results");
  const ReadingOrder order = reading_order(b.page);
  const auto captions = associate_captions(b.page, order);
  const auto edges = emit_references(b.page, captions, order, default_reference_patterns());
  CHECK(edge_set(edges) == std::set<EdgeKey>{{text, RelationType::Reference, table}});
}

TEST_CASE("caption references another container but never its own, and nothing references a caption") {
  StackBuilder b;
  const int table = b.add_row(Category::Table);
  b.add_row(Category::Caption, "Table 1: data");
  const int picture = b.add_row(Category::Picture);
  const int fig_caption = b.add_row(Category::Caption, "Figure 2 (cf. Table 1)");
  const ReadingOrder order = reading_order(b.page);
  const auto captions = associate_captions(b.page, order);
  const auto edges = emit_references(b.page, captions, order, default_reference_patterns());

  CHECK(edge_set(edges) == std::set<EdgeKey>{{fig_caption, RelationType::Reference, table}});
  for (const RelationEdge& edge : edges) {
    CHECK(edge.object != fig_caption);
    CHECK((edge.subject != fig_caption || edge.object != picture));
  }
}

TEST_CASE("ordinal fallback works and out-of-range ordinals are dropped") {
  StackBuilder b;
  const int text = b.add_row(Category::Text, "see Table 2 and see Table 3");
  const int table1 = b.add_row(Category::Table);
  const int table2 = b.add_row(Category::Table);
  (void)table1;
  const ReadingOrder order = reading_order(b.page);
  const auto edges =
      emit_references(b.page, associate_captions(b.page, order), order, default_reference_patterns());
  // no captions: "Table 2" falls back to the second table in reading order,
  // "Table 3" is out of range
  CHECK(edge_set(edges) == std::set<EdgeKey>{{text, RelationType::Reference, table2}});
}

TEST_CASE("footnote markers link glued numbers and symbols") {
  StackBuilder b;
  const int text = b.add_row(Category::Text, "As shown earlier1, the result holds† too.");
  const int plain = b.add_row(Category::Text, "Mentions 1 alone or Table 1 do not count.");
  const int f1 = b.add_row(Category::Footnote, "1 First note.");
  const int f2 = b.add_row(Category::Footnote, "† Symbol note.");
  const ReadingOrder order = reading_order(b.page);
  const auto edges =
      emit_references(b.page, associate_captions(b.page, order), order, default_reference_patterns());
  CHECK(edge_set(edges) == std::set<EdgeKey>{{text, RelationType::Reference, f1},
                                             {text, RelationType::Reference, f2}});
  for (const RelationEdge& edge : edges) {
    CHECK(edge.subject != plain);
  }
}

TEST_CASE("unassociated and footnote instances never emit references") {
  StackBuilder b;
  b.add_row(Category::PageHeader, "see Table 1");
  b.add_row(Category::Title, "see Table 1");
  b.add_row(Category::Footnote, "2 see Table 1");
  b.add_row(Category::Table);
  const ReadingOrder order = reading_order(b.page);
  const auto edges =
      emit_references(b.page, associate_captions(b.page, order), order, default_reference_patterns());
  CHECK(edges.empty());
}

TEST_CASE("annotate on an empty page yields an empty graph") {
  Page page;
  page.width = 100;
  page.height = 100;
  CHECK(annotate(page).page.relations.empty());
}

TEST_CASE("annotate on a stacked section emits 9 edges") {
  StackBuilder b;
  b.add_row(Category::SectionHeader, "Section 1");
  b.add_row(Category::Text, "first paragraph");
  b.add_row(Category::Text, "second paragraph");
  const auto edges = annotate(b.page).page.relations;
  CHECK(edges.size() == 9);
  CHECK(count_type(edges, RelationType::Up) + count_type(edges, RelationType::Down) == 4);
  CHECK(count_type(edges, RelationType::Parent) == 2);
  CHECK(count_type(edges, RelationType::Child) == 2);
  CHECK(count_type(edges, RelationType::Sequence) == 1);
}

TEST_CASE("annotate is idempotent on its own output") {
  std::mt19937 rng(41);
  for (int i = 0; i < 25; ++i) {
    const Page page = ts::random_layout_page(rng, i, {.max_boxes = 20, .with_content = true});
    const DocumentGraph graph = annotate(page);
    Page stripped = graph.page;
    stripped.relations.clear();
    CHECK(edge_set(annotate(stripped).page.relations) == edge_set(graph.page.relations));
    // and the already-annotated page re-annotates identically too
    CHECK(edge_set(annotate(graph.page).page.relations) == edge_set(graph.page.relations));
  }
}

TEST_CASE("annotate rejects invalid pages with the report attached") {
  Page page;
  page.width = 100;
  page.height = 100;
  page.instances.push_back({0, {0, 0, 50, 50}, Category::Text, "a", std::nullopt});
  page.instances.push_back({1, {10, 10, 50, 50}, Category::Text, "b", std::nullopt});
  try {
    (void)annotate(page);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.reports().size() == 1);
    CHECK(!e.reports()[0].ok());
  }
}

TEST_CASE("structural invariants of annotate output") {
  std::mt19937 rng(42);
  for (int i = 0; i < 40; ++i) {
    const Page page = ts::random_layout_page(rng, i, {.max_boxes = 25, .with_content = true});
    const auto edges = annotate(page).page.relations;

    // no duplicate triples
    std::set<EdgeKey> seen;
    for (const RelationEdge& edge : edges) {
      CHECK(seen.insert({edge.subject, edge.rel, edge.object}).second);
    }

    // parent/child duality
    std::set<std::pair<int, int>> parents;
    std::set<std::pair<int, int>> children;
    for (const RelationEdge& edge : edges) {
      if (edge.rel == RelationType::Parent) {
        parents.insert({edge.subject, edge.object});
      } else if (edge.rel == RelationType::Child) {
        children.insert({edge.object, edge.subject});
      }
    }
    CHECK(parents == children);

    // sequence edges form vertex-disjoint simple paths
    std::set<int> sequence_out;
    std::set<int> sequence_in;
    for (const RelationEdge& edge : edges) {
      if (edge.rel == RelationType::Sequence) {
        CHECK(sequence_out.insert(edge.subject).second);
        CHECK(sequence_in.insert(edge.object).second);
      }
    }

    // logical edges never touch Unassociated instances, and Footnotes only
    // as Reference objects
    for (const RelationEdge& edge : edges) {
      if (!is_logical(edge.rel)) {
        continue;
      }
      for (const int endpoint : {edge.subject, edge.object}) {
        const RoleGroup group = role_group(page.find(endpoint)->category);
        if (group == RoleGroup::Unassociated) {
          FAIL("logical edge touches an Unassociated instance");
        }
        if (group == RoleGroup::ReferenceOnly) {
          CHECK(edge.rel == RelationType::Reference);
          CHECK(endpoint == edge.object);
        }
      }
      if (edge.rel == RelationType::Reference) {
        CHECK(page.find(edge.object)->category != Category::Caption);
      }
    }

    // spatial + logical counts add up to the stats totals
    Dataset dataset;
    dataset.pages.push_back(annotate(page).page);
    const StatsReport stats = compute_stats(dataset);
    const std::size_t spatial = std::count_if(edges.begin(), edges.end(), [](const RelationEdge& e) {
      return is_spatial(e.rel);
    });
    CHECK(stats.total_relations == edges.size());
    CHECK(stats.spatial_relations == spatial);
    CHECK(stats.logical_relations == edges.size() - spatial);
  }
}

TEST_CASE("spatial-only and logical-only restrictions") {
  StackBuilder b;
  b.add_row(Category::SectionHeader, "Section 1");
  b.add_row(Category::Text, "first");
  AnnotateConfig spatial_only;
  spatial_only.logical = false;
  AnnotateConfig logical_only;
  logical_only.spatial = false;
  for (const RelationEdge& edge : annotate(b.page, spatial_only).page.relations) {
    CHECK(is_spatial(edge.rel));
  }
  for (const RelationEdge& edge : annotate(b.page, logical_only).page.relations) {
    CHECK(is_logical(edge.rel));
  }
}

TEST_CASE("sequence chains stay inside sibling groups on random pages") {
  std::mt19937 rng(43);
  for (int i = 0; i < 30; ++i) {
    const Page page = ts::random_layout_page(rng, i, {.max_boxes = 22, .with_content = true});
    const ReadingOrder order = reading_order(page);
    const auto forest = build_hierarchy(page, order);
    const auto edges = emit_sequence(forest, order);
    const auto group_of = [&forest](int id) {
      const auto it = forest.parent_of.find(id);
      return it == forest.parent_of.end() ? -1 : it->second;
    };
    for (const RelationEdge& edge : edges) {
      CHECK(group_of(edge.subject) == group_of(edge.object));
    }
  }
}

TEST_CASE("pattern files load and reject bad input") {
  const std::string good = "/tmp/docgraph_patterns_good.txt";
  {
    std::ofstream out(good);
    out << "# custom markers\n";
    out << "table\tTbl\\.\\s*(\\d+)\n";
    out << "figure\tExhibit\\s*(\\d+)\t1\n";
  }
  const auto patterns = load_reference_patterns(good);
  REQUIRE(patterns.size() == 2);
  CHECK(patterns[0].kind == ReferenceKind::TableRef);
  CHECK(patterns[1].kind == ReferenceKind::FigureRef);

  const std::string bad = "/tmp/docgraph_patterns_bad.txt";
  {
    std::ofstream out(bad);
    out << "table no-tab-here\n";
  }
  CHECK_THROWS_AS((void)load_reference_patterns(bad), FormatError);
  CHECK_THROWS_AS((void)load_reference_patterns("/tmp/does_not_exist_docgraph.txt"), IoError);
}

TEST_SUITE_END();
