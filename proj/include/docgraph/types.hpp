#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docgraph {

// Axis-aligned box in page pixels. Origin is the top-left page corner and y
// grows downward; the box is stored as (left, top, width, height).
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double left() const { return x; }
  double top() const { return y; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }

  bool operator==(const BoundingBox&) const = default;
};

/// Intersection over union of two boxes; 0 when disjoint, 1 when identical.
double iou(const BoundingBox& a, const BoundingBox& b);

// The 11 layout categories (DocLayNet label set).
enum class Category {
  Caption,
  Footnote,
  Formula,
  ListItem,
  PageFooter,
  PageHeader,
  Picture,
  SectionHeader,
  Table,
  Text,
  Title,
};

inline constexpr std::array<Category, 11> kAllCategories = {
    Category::Caption,    Category::Footnote,   Category::Formula,
    Category::ListItem,   Category::PageFooter, Category::PageHeader,
    Category::Picture,    Category::SectionHeader, Category::Table,
    Category::Text,       Category::Title,
};

std::string_view to_string(Category category);
std::optional<Category> category_from_string(std::string_view name);

// Four spatial directions plus four logical relation types.
enum class RelationType {
  Up,
  Down,
  Left,
  Right,
  Parent,
  Child,
  Sequence,
  Reference,
};

inline constexpr std::array<RelationType, 8> kAllRelationTypes = {
    RelationType::Up,     RelationType::Down,  RelationType::Left,
    RelationType::Right,  RelationType::Parent, RelationType::Child,
    RelationType::Sequence, RelationType::Reference,
};

bool is_spatial(RelationType rel);
bool is_logical(RelationType rel);
std::string_view to_string(RelationType rel);
std::optional<RelationType> relation_from_string(std::string_view name);

// One detected or annotated layout element. Ground-truth instances carry no
// score; predicted instances do. Table and Picture instances carry no text.
struct LayoutInstance {
  int id = 0;
  BoundingBox bbox;
  Category category = Category::Text;
  std::optional<std::string> text;
  std::optional<double> score;

  bool operator==(const LayoutInstance&) const = default;
};

// Directed typed edge between two instances of the same page. `existence` is
// the optional auxiliary pair-existence score attached to predictions.
struct RelationEdge {
  int subject = 0;
  int object = 0;
  RelationType rel = RelationType::Up;
  std::optional<double> score;
  std::optional<double> existence;

  bool operator==(const RelationEdge&) const = default;
};

struct Page {
  int id = 0;
  double width = 0.0;
  double height = 0.0;
  std::vector<LayoutInstance> instances;
  std::vector<RelationEdge> relations;

  const LayoutInstance* find(int instance_id) const;

  bool operator==(const Page&) const = default;
};

// A page viewed as the relation graph G = (V, E): nodes are the layout
// instances, edges the typed relations. The unit handed to evaluation and
// export.
struct DocumentGraph {
  Page page;

  bool operator==(const DocumentGraph&) const = default;
};

}  // namespace docgraph
