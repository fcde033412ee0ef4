#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "docgraph/dataset.hpp"
#include "docgraph/errors.hpp"
#include "docgraph/evaluation.hpp"
#include "docgraph/parallel.hpp"
#include "docgraph/relations.hpp"
#include "docgraph/validate.hpp"
#include "json.hpp"

using njson = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 3;

std::string fixed6(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

docgraph::LoadResult load_with_warnings(const std::string& path) {
  docgraph::LoadResult result = docgraph::load_dataset(path);
  for (const std::string& warning : result.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  return result;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw docgraph::IoError("cannot open " + path + " for writing");
  }
  out << content;
  if (!out) {
    throw docgraph::IoError("write failed: " + path);
  }
}

njson validation_json(const docgraph::DatasetValidation& validation) {
  njson root;
  root["valid"] = validation.ok();
  root["dataset_issues"] = validation.dataset_issues;
  root["pages"] = njson::array();
  for (const docgraph::ValidationReport& report : validation.pages) {
    njson page;
    page["page"] = report.page_id;
    page["violations"] = njson::array();
    for (const docgraph::Violation& violation : report.violations) {
      njson entry;
      entry["kind"] = std::string(docgraph::to_string(violation.kind));
      entry["ids"] = violation.ids;
      entry["detail"] = violation.detail;
      page["violations"].push_back(std::move(entry));
    }
    root["pages"].push_back(std::move(page));
  }
  return root;
}

std::string validation_text(const docgraph::DatasetValidation& validation) {
  std::ostringstream out;
  if (validation.ok()) {
    out << "valid\n";
    return out.str();
  }
  for (const std::string& issue : validation.dataset_issues) {
    out << "dataset: " << issue << "\n";
  }
  for (const docgraph::ValidationReport& report : validation.pages) {
    for (const docgraph::Violation& violation : report.violations) {
      out << "page " << report.page_id << ": " << docgraph::to_string(violation.kind) << " [";
      for (std::size_t i = 0; i < violation.ids.size(); ++i) {
        out << (i ? ", " : "") << violation.ids[i];
      }
      out << "] " << violation.detail << "\n";
    }
  }
  return out.str();
}

void report_validation_failure(const docgraph::DatasetValidation& validation,
                               const std::string& label) {
  std::cerr << "error: " << label << " failed validation\n" << validation_text(validation);
}

// ---- annotate ----------------------------------------------------------

struct AnnotateArgs {
  std::string input;
  std::string output = "-";
  double xy_min_gap = 0.0;
  std::string pattern_file;
  bool spatial_only = false;
  bool logical_only = false;
  unsigned jobs = 0;
};

int run_annotate(const AnnotateArgs& args) {
  docgraph::LoadResult loaded = load_with_warnings(args.input);

  const docgraph::DatasetValidation validation = docgraph::validate_dataset(loaded.dataset);
  if (!validation.ok()) {
    report_validation_failure(validation, args.input);
    return kExitValidation;
  }

  docgraph::AnnotateConfig config;
  config.xy_min_gap = args.xy_min_gap;
  config.spatial = !args.logical_only;
  config.logical = !args.spatial_only;
  if (!args.pattern_file.empty()) {
    config.patterns = docgraph::load_reference_patterns(args.pattern_file);
  }

  std::vector<docgraph::Page> annotated(loaded.dataset.pages.size());
  docgraph::parallel_for(loaded.dataset.pages.size(), args.jobs, [&](std::size_t i) {
    annotated[i] = docgraph::annotate(loaded.dataset.pages[i], config).page;
  });

  docgraph::Dataset output;
  output.metadata = loaded.dataset.metadata;
  output.pages = std::move(annotated);
  write_output(args.output, docgraph::serialize_dataset(output));
  return kExitOk;
}

// ---- evaluate ----------------------------------------------------------

struct EvaluateArgs {
  std::string gt_path;
  std::string pred_path;
  double t_iou = 0.5;
  std::vector<double> rel_thresholds = {0.5};
  std::size_t max_dets = 300;
  bool fuse_existence = false;
  std::string format = "text";
  unsigned jobs = 0;
};

njson metric_json(const docgraph::MetricReport& report, std::size_t max_dets) {
  njson root;
  root["t_iou"] = report.t_iou;
  root["relations"] = njson::array();
  for (const docgraph::RelationMetricReport& relation : report.relation_reports) {
    njson entry;
    entry["t_r"] = relation.t_r;
    entry["mr_g"] = relation.mr_g ? njson(*relation.mr_g) : njson(nullptr);
    entry["map_g"] = relation.map_g ? njson(*relation.map_g) : njson(nullptr);
    entry["per_category"] = njson::array();
    for (docgraph::RelationType rel : docgraph::kAllRelationTypes) {
      const auto it = relation.per_category.find(rel);
      if (it == relation.per_category.end()) {
        continue;
      }
      njson category;
      category["type"] = std::string(docgraph::to_string(rel));
      category["support"] = it->second.support;
      category["predictions"] = it->second.predictions;
      category["true_positives"] = it->second.true_positives;
      category["recall"] = it->second.recall;
      category["ap"] = it->second.ap;
      entry["per_category"].push_back(std::move(category));
    }
    entry["zero_support"] = njson::array();
    for (docgraph::RelationType rel : relation.zero_support) {
      entry["zero_support"].push_back(std::string(docgraph::to_string(rel)));
    }
    root["relations"].push_back(std::move(entry));
  }

  njson dla;
  dla["map"] = report.dla.map ? njson(*report.dla.map) : njson(nullptr);
  dla["iou_thresholds"] = report.dla.thresholds;
  dla["max_detections_per_page"] = max_dets;
  dla["per_category"] = njson::array();
  for (docgraph::Category category : docgraph::kAllCategories) {
    const auto it = report.dla.per_category.find(category);
    if (it == report.dla.per_category.end()) {
      continue;
    }
    njson entry;
    entry["category"] = std::string(docgraph::to_string(category));
    entry["ap"] = it->second;
    dla["per_category"].push_back(std::move(entry));
  }
  dla["zero_support"] = njson::array();
  for (docgraph::Category category : report.dla.zero_support) {
    dla["zero_support"].push_back(std::string(docgraph::to_string(category)));
  }
  root["dla"] = std::move(dla);
  return root;
}

std::string metric_text(const docgraph::MetricReport& report, std::size_t max_dets) {
  std::ostringstream out;
  out << "instance matching: T_IoU = " << fixed6(report.t_iou) << "\n";
  for (const docgraph::RelationMetricReport& relation : report.relation_reports) {
    out << "\nrelation metrics @ T_R = " << fixed6(relation.t_r) << "\n";
    out << "  " << std::left << std::setw(10) << "type" << std::right << std::setw(9) << "support"
        << std::setw(11) << "predicted" << std::setw(10) << "recall" << std::setw(10) << "ap"
        << "\n";
    for (docgraph::RelationType rel : docgraph::kAllRelationTypes) {
      const auto it = relation.per_category.find(rel);
      if (it == relation.per_category.end()) {
        continue;
      }
      out << "  " << std::left << std::setw(10) << docgraph::to_string(rel) << std::right
          << std::setw(9) << it->second.support << std::setw(11) << it->second.predictions
          << std::setw(10) << fixed6(it->second.recall) << std::setw(10) << fixed6(it->second.ap)
          << "\n";
    }
    out << "  mR_g  = " << (relation.mr_g ? fixed6(*relation.mr_g) : "undefined") << "\n";
    out << "  mAP_g = " << (relation.map_g ? fixed6(*relation.map_g) : "undefined") << "\n";
    if (!relation.zero_support.empty()) {
      out << "  no ground-truth support:";
      for (docgraph::RelationType rel : relation.zero_support) {
        out << " " << docgraph::to_string(rel);
      }
      out << "\n";
    }
  }

  out << "\ndetection mAP@[0.50:0.05:0.95], max " << max_dets << " detections/page\n";
  for (docgraph::Category category : docgraph::kAllCategories) {
    const auto it = report.dla.per_category.find(category);
    if (it == report.dla.per_category.end()) {
      continue;
    }
    out << "  " << std::left << std::setw(16) << docgraph::to_string(category) << std::right
        << std::setw(10) << fixed6(it->second) << "\n";
  }
  out << "  mAP = " << (report.dla.map ? fixed6(*report.dla.map) : "undefined") << "\n";
  if (!report.dla.zero_support.empty()) {
    out << "  no ground-truth support:";
    for (docgraph::Category category : report.dla.zero_support) {
      out << " " << docgraph::to_string(category);
    }
    out << "\n";
  }
  return out.str();
}

int run_evaluate(const EvaluateArgs& args) {
  docgraph::LoadResult gt = load_with_warnings(args.gt_path);
  docgraph::LoadResult pred = load_with_warnings(args.pred_path);

  const docgraph::DatasetValidation gt_validation = docgraph::validate_dataset(gt.dataset);
  if (!gt_validation.ok()) {
    report_validation_failure(gt_validation, args.gt_path);
    return kExitValidation;
  }
  bool gt_scored = false;
  for (const docgraph::Page& page : gt.dataset.pages) {
    for (const docgraph::LayoutInstance& instance : page.instances) {
      gt_scored = gt_scored || instance.score.has_value();
    }
    for (const docgraph::RelationEdge& edge : page.relations) {
      gt_scored = gt_scored || edge.score.has_value();
    }
  }
  if (gt_scored) {
    std::cerr << "error: ground truth carries confidence scores; " << args.gt_path
              << " looks like a prediction file\n";
    return kExitValidation;
  }

  const docgraph::DatasetValidation pred_validation = docgraph::validate_predictions(pred.dataset);
  if (!pred_validation.ok()) {
    report_validation_failure(pred_validation, args.pred_path);
    return kExitValidation;
  }

  std::map<int, const docgraph::Page*> gt_by_id;
  for (const docgraph::Page& page : gt.dataset.pages) {
    gt_by_id[page.id] = &page;
  }
  for (const docgraph::Page& page : pred.dataset.pages) {
    const auto it = gt_by_id.find(page.id);
    if (it == gt_by_id.end()) {
      std::cerr << "warning: prediction page " << page.id << " has no ground-truth page; ignored\n";
    } else if (it->second->width != page.width || it->second->height != page.height) {
      std::cerr << "error: page " << page.id
                << " dimensions differ between ground truth and prediction\n";
      return kExitValidation;
    }
  }

  docgraph::EvalConfig config;
  config.t_iou = args.t_iou;
  config.rel_thresholds = args.rel_thresholds;
  config.max_detections_per_page = args.max_dets;
  config.fuse_existence = args.fuse_existence;
  config.jobs = args.jobs;
  const docgraph::MetricReport report = docgraph::evaluate(gt.dataset, pred.dataset, config);

  if (args.format == "json") {
    std::cout << metric_json(report, args.max_dets).dump(2) << "\n";
  } else {
    std::cout << metric_text(report, args.max_dets);
  }

  bool undefined = !report.dla.map.has_value();
  for (const docgraph::RelationMetricReport& relation : report.relation_reports) {
    undefined = undefined || !relation.mr_g.has_value() || !relation.map_g.has_value();
  }
  if (undefined) {
    std::cerr << "error: some metrics are undefined (no ground-truth support)\n";
    return kExitValidation;
  }
  return kExitOk;
}

// ---- stats -------------------------------------------------------------

struct StatsArgs {
  std::string input;
  std::string format = "text";
};

njson stats_json(const docgraph::StatsReport& report) {
  njson root;
  root["pages"] = report.page_count;
  root["instances"] = report.total_instances;
  root["relations"] = report.total_relations;
  root["spatial_relations"] = report.spatial_relations;
  root["logical_relations"] = report.logical_relations;
  root["spatial_share"] = report.spatial_share;
  root["logical_share"] = report.logical_share;
  root["per_type"] = njson::object();
  for (docgraph::RelationType rel : docgraph::kAllRelationTypes) {
    const auto it = report.per_type.find(rel);
    root["per_type"][std::string(docgraph::to_string(rel))] =
        it == report.per_type.end() ? 0 : it->second;
  }
  root["instances_per_category"] = njson::object();
  for (docgraph::Category category : docgraph::kAllCategories) {
    const auto it = report.instances_per_category.find(category);
    root["instances_per_category"][std::string(docgraph::to_string(category))] =
        it == report.instances_per_category.end() ? 0 : it->second;
  }
  root["per_pair"] = njson::array();
  for (const auto& [key, count] : report.per_pair) {
    const auto& [subject, object, rel] = key;
    njson entry;
    entry["subject"] = std::string(docgraph::to_string(subject));
    entry["object"] = std::string(docgraph::to_string(object));
    entry["type"] = std::string(docgraph::to_string(rel));
    entry["count"] = count;
    root["per_pair"].push_back(std::move(entry));
  }
  return root;
}

std::string stats_text(const docgraph::StatsReport& report) {
  std::ostringstream out;
  out << "pages:             " << report.page_count << "\n";
  out << "instances:         " << report.total_instances << "\n";
  out << "relations:         " << report.total_relations << "\n";
  out << "spatial relations: " << report.spatial_relations << " (share "
      << fixed6(report.spatial_share) << ")\n";
  out << "logical relations: " << report.logical_relations << " (share "
      << fixed6(report.logical_share) << ")\n";
  out << "\nper relation type\n";
  for (docgraph::RelationType rel : docgraph::kAllRelationTypes) {
    const auto it = report.per_type.find(rel);
    out << "  " << std::left << std::setw(10) << docgraph::to_string(rel) << std::right
        << std::setw(12) << (it == report.per_type.end() ? 0 : it->second) << "\n";
  }
  out << "\ninstances per category\n";
  for (docgraph::Category category : docgraph::kAllCategories) {
    const auto it = report.instances_per_category.find(category);
    out << "  " << std::left << std::setw(16) << docgraph::to_string(category) << std::right
        << std::setw(12) << (it == report.instances_per_category.end() ? 0 : it->second) << "\n";
  }
  out << "\nper (subject, object, type)\n";
  for (const auto& [key, count] : report.per_pair) {
    const auto& [subject, object, rel] = key;
    std::ostringstream pair;
    pair << docgraph::to_string(subject) << " -> " << docgraph::to_string(object) << " "
         << docgraph::to_string(rel);
    out << "  " << std::left << std::setw(40) << pair.str() << std::right << std::setw(10) << count
        << "\n";
  }
  return out.str();
}

int run_stats(const StatsArgs& args) {
  docgraph::LoadResult loaded = load_with_warnings(args.input);
  const docgraph::DatasetValidation validation = docgraph::validate_dataset(loaded.dataset);
  if (!validation.ok()) {
    report_validation_failure(validation, args.input);
    return kExitValidation;
  }
  const docgraph::StatsReport report = docgraph::compute_stats(loaded.dataset);
  if (args.format == "json") {
    std::cout << stats_json(report).dump(2) << "\n";
  } else {
    std::cout << stats_text(report);
  }
  return kExitOk;
}

// ---- export ------------------------------------------------------------

struct ExportArgs {
  std::string input;
  std::string output = "-";
  std::string format = "dot";
  std::string types = "all";
  std::optional<int> page_id;
};

std::optional<std::vector<docgraph::RelationType>> parse_types(const std::string& spec) {
  using docgraph::RelationType;
  if (spec == "all") {
    return std::vector<RelationType>(docgraph::kAllRelationTypes.begin(),
                                     docgraph::kAllRelationTypes.end());
  }
  if (spec == "spatial") {
    return std::vector<RelationType>{RelationType::Up, RelationType::Down, RelationType::Left,
                                     RelationType::Right};
  }
  if (spec == "logical") {
    return std::vector<RelationType>{RelationType::Parent, RelationType::Child,
                                     RelationType::Sequence, RelationType::Reference};
  }
  std::vector<RelationType> types;
  std::istringstream in(spec);
  std::string token;
  while (std::getline(in, token, ',')) {
    const auto rel = docgraph::relation_from_string(token);
    if (!rel) {
      return std::nullopt;
    }
    types.push_back(*rel);
  }
  if (types.empty()) {
    return std::nullopt;
  }
  return types;
}

int run_export(const ExportArgs& args) {
  const auto types = parse_types(args.types);
  if (!types) {
    std::cerr
        << "error: --types expects all, spatial, logical, or a comma list of relation names\n";
    return kExitUsage;
  }

  docgraph::LoadResult loaded = load_with_warnings(args.input);
  const docgraph::DatasetValidation validation = docgraph::validate_dataset(loaded.dataset);
  if (!validation.ok()) {
    report_validation_failure(validation, args.input);
    return kExitValidation;
  }

  std::vector<const docgraph::Page*> pages;
  for (const docgraph::Page& page : loaded.dataset.pages) {
    if (!args.page_id || page.id == *args.page_id) {
      pages.push_back(&page);
    }
  }
  if (args.page_id && pages.empty()) {
    std::cerr << "error: no page with id " << *args.page_id << "\n";
    return kExitValidation;
  }

  docgraph::ExportOptions options;
  options.types = *types;
  std::ostringstream out;
  for (const docgraph::Page* page : pages) {
    out << (args.format == "graphml" ? docgraph::export_graphml(*page, options)
                                     : docgraph::export_dot(*page, options));
  }
  write_output(args.output, out.str());
  return kExitOk;
}

// ---- validate ----------------------------------------------------------

struct ValidateArgs {
  std::string input;
  bool prediction = false;
  std::string format = "text";
};

int run_validate(const ValidateArgs& args) {
  docgraph::LoadResult loaded = load_with_warnings(args.input);
  const docgraph::DatasetValidation validation =
      args.prediction ? docgraph::validate_predictions(loaded.dataset)
                      : docgraph::validate_dataset(loaded.dataset);
  if (args.format == "json") {
    std::cout << validation_json(validation).dump(2) << "\n";
  } else {
    std::cout << validation_text(validation);
  }
  return validation.ok() ? kExitOk : kExitValidation;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const docgraph::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const docgraph::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const docgraph::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"document layout relation graphs: rule-based annotation and graph metrics"};
  app.require_subcommand(1);

  AnnotateArgs annotate_args;
  CLI::App* annotate = app.add_subcommand(
      "annotate", "build the spatial+logical relation graph for every page of a layout file");
  annotate->add_option("input", annotate_args.input, "layout dataset (JSON)")->required();
  annotate->add_option("-o,--output", annotate_args.output, "output path, - for stdout");
  annotate
      ->add_option("--xy-min-gap", annotate_args.xy_min_gap,
                   "minimum whitespace band width for an X-Y cut, in pixels")
      ->check(CLI::NonNegativeNumber);
  annotate->add_option("--ref-patterns", annotate_args.pattern_file,
                       "reference pattern file (kind<TAB>pattern per line)");
  CLI::Option* spatial_only =
      annotate->add_flag("--spatial-only", annotate_args.spatial_only, "emit only spatial edges");
  annotate->add_flag("--logical-only", annotate_args.logical_only, "emit only logical edges")
      ->excludes(spatial_only);
  annotate->add_option("--jobs", annotate_args.jobs, "worker threads (0 = all cores)");

  EvaluateArgs evaluate_args;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "match predictions to ground truth and report mR_g, mAP_g, and detection mAP");
  evaluate->add_option("--gt", evaluate_args.gt_path, "ground-truth dataset (JSON)")->required();
  evaluate->add_option("--pred", evaluate_args.pred_path, "prediction dataset (JSON)")->required();
  evaluate->add_option("--iou-threshold", evaluate_args.t_iou, "instance matching IoU threshold")
      ->check(CLI::Range(0.0, 1.0));
  evaluate
      ->add_option("--rel-thresholds", evaluate_args.rel_thresholds,
                   "comma list of relation confidence thresholds")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--max-dets", evaluate_args.max_dets, "max detections per page for mAP");
  evaluate->add_flag("--fuse-existence", evaluate_args.fuse_existence,
                     "multiply relation scores by their existence scores before evaluation");
  evaluate->add_option("--format", evaluate_args.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  evaluate->add_option("--jobs", evaluate_args.jobs, "worker threads (0 = all cores)");

  StatsArgs stats_args;
  CLI::App* stats = app.add_subcommand("stats", "relation and instance statistics for a dataset");
  stats->add_option("input", stats_args.input, "dataset (JSON)")->required();
  stats->add_option("--format", stats_args.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  ExportArgs export_args;
  CLI::App* exporter = app.add_subcommand("export", "write relation graphs as DOT or GraphML");
  exporter->add_option("input", export_args.input, "dataset (JSON)")->required();
  exporter->add_option("-o,--output", export_args.output, "output path, - for stdout");
  exporter->add_option("--format", export_args.format, "dot or graphml")
      ->check(CLI::IsMember({"dot", "graphml"}));
  exporter->add_option("--types", export_args.types,
                       "all, spatial, logical, or a comma list of relation names");
  int page_id = 0;
  CLI::Option* page_option = exporter->add_option("--page", page_id, "export only this page id");

  ValidateArgs validate_args;
  CLI::App* validate = app.add_subcommand("validate", "check every page invariant of a dataset");
  validate->add_option("input", validate_args.input, "dataset (JSON)")->required();
  validate->add_flag("--prediction", validate_args.prediction,
                     "prediction profile: overlap allowed, scores required");
  validate->add_option("--format", validate_args.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (page_option->count() > 0) {
    export_args.page_id = page_id;
  }

  if (app.got_subcommand(annotate)) {
    return guarded([&] { return run_annotate(annotate_args); });
  }
  if (app.got_subcommand(evaluate)) {
    return guarded([&] { return run_evaluate(evaluate_args); });
  }
  if (app.got_subcommand(stats)) {
    return guarded([&] { return run_stats(stats_args); });
  }
  if (app.got_subcommand(exporter)) {
    return guarded([&] { return run_export(export_args); });
  }
  if (app.got_subcommand(validate)) {
    return guarded([&] { return run_validate(validate_args); });
  }
  return kExitUsage;
}
