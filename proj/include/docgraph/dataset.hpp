#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "docgraph/types.hpp"
#include "docgraph/validate.hpp"

namespace docgraph {

struct Dataset {
  std::vector<Page> pages;
  std::map<std::string, std::string> metadata;

  bool operator==(const Dataset&) const = default;
};

// Scores outside [0, 1] are clamped at load; each clamp produces a warning.
struct LoadResult {
  Dataset dataset;
  std::vector<std::string> warnings;
};

// Throws IoError when the file cannot be read and FormatError (with a
// location such as "pages[3].instances[2].category") on malformed content.
LoadResult load_dataset(const std::string& path);
LoadResult parse_dataset(const std::string& text, const std::string& origin = "<input>");

void save_dataset(const Dataset& dataset, const std::string& path);
std::string serialize_dataset(const Dataset& dataset);

struct DatasetValidation {
  std::vector<ValidationReport> pages;      // reports for invalid pages only
  std::vector<std::string> dataset_issues;  // e.g. duplicate page ids

  bool ok() const { return pages.empty() && dataset_issues.empty(); }
};

DatasetValidation validate_dataset(const Dataset& dataset);
DatasetValidation validate_predictions(const Dataset& dataset);

struct StatsReport {
  std::size_t page_count = 0;
  std::size_t total_instances = 0;
  std::size_t total_relations = 0;
  std::size_t spatial_relations = 0;
  std::size_t logical_relations = 0;
  double spatial_share = 0.0;  // 0 when there are no relations
  double logical_share = 0.0;
  std::map<RelationType, std::size_t> per_type;
  std::map<Category, std::size_t> instances_per_category;
  // (subject category, object category, relation) -> count
  std::map<std::tuple<Category, Category, RelationType>, std::size_t> per_pair;
};

StatsReport compute_stats(const Dataset& dataset);

struct ExportOptions {
  // Relation subset to emit; defaults to all eight types.
  std::vector<RelationType> types{kAllRelationTypes.begin(), kAllRelationTypes.end()};
};

// One node per instance labeled "Category#id", one directed edge per
// relation labeled with its type. Byte-stable for identical input/options.
std::string export_dot(const Page& page, const ExportOptions& options = {});
std::string export_graphml(const Page& page, const ExportOptions& options = {});

}  // namespace docgraph
