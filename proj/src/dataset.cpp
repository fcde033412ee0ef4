#include "docgraph/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "docgraph/errors.hpp"
#include "json.hpp"

namespace docgraph {

namespace {

using nlohmann::json;

std::string index_path(const std::string& base, const char* field, std::size_t index) {
  std::ostringstream path;
  path << base << "." << field << "[" << index << "]";
  return path.str();
}

const json& require(const json& object, const char* key, const std::string& location) {
  const auto it = object.find(key);
  if (it == object.end()) {
    throw FormatError(location, std::string("missing field '") + key + "'");
  }
  return *it;
}

double require_number(const json& object, const char* key, const std::string& location) {
  const json& value = require(object, key, location);
  if (!value.is_number()) {
    throw FormatError(location + "." + key, "expected a number");
  }
  return value.get<double>();
}

int require_int(const json& object, const char* key, const std::string& location) {
  const json& value = require(object, key, location);
  if (!value.is_number_integer()) {
    throw FormatError(location + "." + key, "expected an integer");
  }
  return value.get<int>();
}

// Scores outside [0, 1] are clamped rather than rejected; producers round off
// by an epsilon often enough that rejection would be unhelpful.
std::optional<double> clamped_score(const json& object, const char* key,
                                    const std::string& location,
                                    std::vector<std::string>& warnings) {
  const auto it = object.find(key);
  if (it == object.end()) {
    return std::nullopt;
  }
  if (!it->is_number()) {
    throw FormatError(location + "." + key, "expected a number");
  }
  const double raw = it->get<double>();
  if (std::isnan(raw)) {
    throw FormatError(location + "." + key, "score is NaN");
  }
  const double clamped = std::clamp(raw, 0.0, 1.0);
  if (clamped != raw) {
    std::ostringstream warning;
    warning << location << "." << key << ": value " << raw << " clamped to " << clamped;
    warnings.push_back(warning.str());
  }
  return clamped;
}

LayoutInstance parse_instance(const json& node, const std::string& location,
                              std::vector<std::string>& warnings) {
  if (!node.is_object()) {
    throw FormatError(location, "expected an object");
  }
  LayoutInstance instance;
  instance.id = require_int(node, "id", location);
  if (instance.id < 0) {
    throw FormatError(location + ".id", "instance id must be non-negative");
  }

  const json& category = require(node, "category", location);
  if (!category.is_string()) {
    throw FormatError(location + ".category", "expected a string");
  }
  const auto parsed = category_from_string(category.get<std::string>());
  if (!parsed) {
    throw FormatError(location + ".category",
                      "unknown category '" + category.get<std::string>() + "'");
  }
  instance.category = *parsed;

  const json& bbox = require(node, "bbox", location);
  if (!bbox.is_array() || bbox.size() != 4 ||
      !std::all_of(bbox.begin(), bbox.end(), [](const json& v) { return v.is_number(); })) {
    throw FormatError(location + ".bbox", "expected [x, y, w, h]");
  }
  instance.bbox = {bbox[0].get<double>(), bbox[1].get<double>(), bbox[2].get<double>(),
                   bbox[3].get<double>()};

  if (const auto it = node.find("text"); it != node.end()) {
    if (!it->is_string()) {
      throw FormatError(location + ".text", "expected a string");
    }
    if (instance.category == Category::Table || instance.category == Category::Picture) {
      throw FormatError(location + ".text",
                        "Table and Picture instances carry no text");
    }
    instance.text = it->get<std::string>();
  }
  instance.score = clamped_score(node, "score", location, warnings);
  return instance;
}

RelationEdge parse_relation(const json& node, const std::string& location,
                            std::vector<std::string>& warnings) {
  if (!node.is_object()) {
    throw FormatError(location, "expected an object");
  }
  RelationEdge edge;
  edge.subject = require_int(node, "subject", location);
  edge.object = require_int(node, "object", location);

  const json& type = require(node, "type", location);
  if (!type.is_string()) {
    throw FormatError(location + ".type", "expected a string");
  }
  const auto parsed = relation_from_string(type.get<std::string>());
  if (!parsed) {
    throw FormatError(location + ".type",
                      "unknown relation type '" + type.get<std::string>() + "'");
  }
  edge.rel = *parsed;
  edge.score = clamped_score(node, "score", location, warnings);
  edge.existence = clamped_score(node, "existence", location, warnings);
  return edge;
}

Page parse_page(const json& node, std::size_t index, std::vector<std::string>& warnings) {
  std::ostringstream base;
  base << "pages[" << index << "]";
  const std::string location = base.str();
  if (!node.is_object()) {
    throw FormatError(location, "expected an object");
  }

  Page page;
  page.id = require_int(node, "id", location);
  page.width = require_number(node, "width", location);
  page.height = require_number(node, "height", location);

  if (const auto it = node.find("instances"); it != node.end()) {
    if (!it->is_array()) {
      throw FormatError(location + ".instances", "expected an array");
    }
    for (std::size_t i = 0; i < it->size(); ++i) {
      page.instances.push_back(parse_instance((*it)[i], index_path(location, "instances", i), warnings));
    }
  }
  if (const auto it = node.find("relations"); it != node.end()) {
    if (!it->is_array()) {
      throw FormatError(location + ".relations", "expected an array");
    }
    for (std::size_t i = 0; i < it->size(); ++i) {
      page.relations.push_back(parse_relation((*it)[i], index_path(location, "relations", i), warnings));
    }
  }
  return page;
}

}  // namespace

LoadResult parse_dataset(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream location;
    location << origin << ":byte " << e.byte;
    throw FormatError(location.str(), e.what());
  }
  if (!root.is_object()) {
    throw FormatError(origin, "top level must be an object");
  }

  LoadResult result;
  const json& pages = require(root, "pages", origin);
  if (!pages.is_array()) {
    throw FormatError("pages", "expected an array");
  }
  for (std::size_t i = 0; i < pages.size(); ++i) {
    result.dataset.pages.push_back(parse_page(pages[i], i, result.warnings));
  }

  if (const auto it = root.find("metadata"); it != root.end()) {
    if (!it->is_object()) {
      throw FormatError("metadata", "expected an object");
    }
    for (const auto& [key, value] : it->items()) {
      if (!value.is_string()) {
        throw FormatError("metadata." + key, "expected a string");
      }
      result.dataset.metadata[key] = value.get<std::string>();
    }
  }
  return result;
}

LoadResult load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str(), path);
}

std::string serialize_dataset(const Dataset& dataset) {
  json root;
  root["metadata"] = json::object();
  for (const auto& [key, value] : dataset.metadata) {
    root["metadata"][key] = value;
  }
  root["pages"] = json::array();
  for (const Page& page : dataset.pages) {
    json page_node;
    page_node["id"] = page.id;
    page_node["width"] = page.width;
    page_node["height"] = page.height;
    page_node["instances"] = json::array();
    for (const LayoutInstance& instance : page.instances) {
      json node;
      node["id"] = instance.id;
      node["category"] = std::string(to_string(instance.category));
      node["bbox"] = {instance.bbox.x, instance.bbox.y, instance.bbox.w, instance.bbox.h};
      if (instance.text) {
        node["text"] = *instance.text;
      }
      if (instance.score) {
        node["score"] = *instance.score;
      }
      page_node["instances"].push_back(std::move(node));
    }
    page_node["relations"] = json::array();
    for (const RelationEdge& edge : page.relations) {
      json node;
      node["subject"] = edge.subject;
      node["object"] = edge.object;
      node["type"] = std::string(to_string(edge.rel));
      if (edge.score) {
        node["score"] = *edge.score;
      }
      if (edge.existence) {
        node["existence"] = *edge.existence;
      }
      page_node["relations"].push_back(std::move(node));
    }
    root["pages"].push_back(std::move(page_node));
  }
  return root.dump(2) + "\n";
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << serialize_dataset(dataset);
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

DatasetValidation validate_dataset(const Dataset& dataset) {
  DatasetValidation result;
  std::set<int> page_ids;
  for (const Page& page : dataset.pages) {
    if (!page_ids.insert(page.id).second) {
      std::ostringstream issue;
      issue << "duplicate page id " << page.id;
      result.dataset_issues.push_back(issue.str());
    }
    ValidationReport report = validate_page(page);
    if (!report.ok()) {
      result.pages.push_back(std::move(report));
    }
  }
  return result;
}

DatasetValidation validate_predictions(const Dataset& dataset) {
  DatasetValidation result;
  std::set<int> page_ids;
  for (const Page& page : dataset.pages) {
    if (!page_ids.insert(page.id).second) {
      std::ostringstream issue;
      issue << "duplicate page id " << page.id;
      result.dataset_issues.push_back(issue.str());
    }
    ValidationReport report = validate_prediction_page(page);
    if (!report.ok()) {
      result.pages.push_back(std::move(report));
    }
  }
  return result;
}

StatsReport compute_stats(const Dataset& dataset) {
  StatsReport report;
  report.page_count = dataset.pages.size();
  for (const Page& page : dataset.pages) {
    std::map<int, Category> categories;
    for (const LayoutInstance& instance : page.instances) {
      categories[instance.id] = instance.category;
      ++report.instances_per_category[instance.category];
      ++report.total_instances;
    }
    for (const RelationEdge& edge : page.relations) {
      ++report.total_relations;
      ++report.per_type[edge.rel];
      if (is_spatial(edge.rel)) {
        ++report.spatial_relations;
      } else {
        ++report.logical_relations;
      }
      const auto subject = categories.find(edge.subject);
      const auto object = categories.find(edge.object);
      if (subject != categories.end() && object != categories.end()) {
        ++report.per_pair[{subject->second, object->second, edge.rel}];
      }
    }
  }
  if (report.total_relations > 0) {
    report.spatial_share =
        static_cast<double>(report.spatial_relations) / static_cast<double>(report.total_relations);
    report.logical_share =
        static_cast<double>(report.logical_relations) / static_cast<double>(report.total_relations);
  }
  return report;
}

namespace {

bool type_selected(const ExportOptions& options, RelationType rel) {
  return std::find(options.types.begin(), options.types.end(), rel) != options.types.end();
}

std::vector<const LayoutInstance*> nodes_by_id(const Page& page) {
  std::vector<const LayoutInstance*> nodes;
  for (const LayoutInstance& instance : page.instances) {
    nodes.push_back(&instance);
  }
  std::sort(nodes.begin(), nodes.end(),
            [](const LayoutInstance* a, const LayoutInstance* b) { return a->id < b->id; });
  return nodes;
}

}  // namespace

std::string export_dot(const Page& page, const ExportOptions& options) {
  std::ostringstream out;
  out << "digraph page" << page.id << " {\n";
  for (const LayoutInstance* instance : nodes_by_id(page)) {
    out << "  n" << instance->id << " [label=\"" << to_string(instance->category) << "#"
        << instance->id << "\"];\n";
  }
  for (const RelationEdge& edge : page.relations) {
    if (!type_selected(options, edge.rel)) {
      continue;
    }
    out << "  n" << edge.subject << " -> n" << edge.object << " [label=\"" << to_string(edge.rel)
        << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_graphml(const Page& page, const ExportOptions& options) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      << "  <key id=\"relation\" for=\"edge\" attr.name=\"relation\" attr.type=\"string\"/>\n"
      << "  <graph id=\"page" << page.id << "\" edgedefault=\"directed\">\n";
  for (const LayoutInstance* instance : nodes_by_id(page)) {
    out << "    <node id=\"n" << instance->id << "\"><data key=\"label\">"
        << to_string(instance->category) << "#" << instance->id << "</data></node>\n";
  }
  for (const RelationEdge& edge : page.relations) {
    if (!type_selected(options, edge.rel)) {
      continue;
    }
    out << "    <edge source=\"n" << edge.subject << "\" target=\"n" << edge.object
        << "\"><data key=\"relation\">" << to_string(edge.rel) << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

}  // namespace docgraph
