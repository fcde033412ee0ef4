#include "docgraph/types.hpp"

#include <algorithm>

namespace docgraph {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (ix <= 0.0 || iy <= 0.0) {
    return 0.0;
  }
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

std::string_view to_string(Category category) {
  switch (category) {
    case Category::Caption: return "Caption";
    case Category::Footnote: return "Footnote";
    case Category::Formula: return "Formula";
    case Category::ListItem: return "List-item";
    case Category::PageFooter: return "Page-footer";
    case Category::PageHeader: return "Page-header";
    case Category::Picture: return "Picture";
    case Category::SectionHeader: return "Section-header";
    case Category::Table: return "Table";
    case Category::Text: return "Text";
    case Category::Title: return "Title";
  }
  return "?";
}

std::optional<Category> category_from_string(std::string_view name) {
  for (Category category : kAllCategories) {
    if (to_string(category) == name) {
      return category;
    }
  }
  return std::nullopt;
}

bool is_spatial(RelationType rel) {
  switch (rel) {
    case RelationType::Up:
    case RelationType::Down:
    case RelationType::Left:
    case RelationType::Right:
      return true;
    default:
      return false;
  }
}

bool is_logical(RelationType rel) { return !is_spatial(rel); }

std::string_view to_string(RelationType rel) {
  switch (rel) {
    case RelationType::Up: return "Up";
    case RelationType::Down: return "Down";
    case RelationType::Left: return "Left";
    case RelationType::Right: return "Right";
    case RelationType::Parent: return "Parent";
    case RelationType::Child: return "Child";
    case RelationType::Sequence: return "Sequence";
    case RelationType::Reference: return "Reference";
  }
  return "?";
}

std::optional<RelationType> relation_from_string(std::string_view name) {
  for (RelationType rel : kAllRelationTypes) {
    if (to_string(rel) == name) {
      return rel;
    }
  }
  return std::nullopt;
}

const LayoutInstance* Page::find(int instance_id) const {
  for (const LayoutInstance& instance : instances) {
    if (instance.id == instance_id) {
      return &instance;
    }
  }
  return nullptr;
}

}  // namespace docgraph
