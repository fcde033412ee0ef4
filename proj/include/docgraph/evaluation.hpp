#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "docgraph/dataset.hpp"
#include "docgraph/types.hpp"

namespace docgraph {

// Injective ground-truth -> prediction assignment and its inverse.
struct InstanceMapping {
  std::map<int, int> gt_to_pred;  // M
  std::map<int, int> pred_to_gt;  // L
};

// Greedy instance matching: predictions visited in descending score (ties by
// ascending id); each is assigned to its best-IoU ground truth of the same
// category when IoU strictly exceeds `t_iou`, displacing a previous
// assignment only on strictly higher IoU. Displaced predictions are not
// re-queued. Throws std::invalid_argument when page dimensions differ or a
// prediction lacks a score.
InstanceMapping match_instances(const Page& gt, const Page& pred, double t_iou);

struct Triplet {
  std::int64_t subject = 0;
  RelationType predicate = RelationType::Up;
  std::int64_t object = 0;

  auto operator<=>(const Triplet&) const = default;
};

struct ScoredTriplet {
  std::int64_t subject = 0;
  RelationType predicate = RelationType::Up;
  std::int64_t object = 0;
  double score = 0.0;
};

// Keeps predicted edges with score strictly above `t_r` whose endpoints are
// both matched; endpoints are rewritten to ground-truth ids. Throws
// std::invalid_argument on an unscored edge.
std::vector<ScoredTriplet> filter_relations(const std::vector<RelationEdge>& pred_edges,
                                            const InstanceMapping& mapping,
                                            double t_r);

// Per-relation-category results; `mean` is empty when the ground truth holds
// no triplet at all (undefined, not zero). Categories without ground-truth
// support are excluded from the mean and listed in `zero_support`.
struct RecallResult {
  std::map<RelationType, double> per_category;
  std::vector<RelationType> zero_support;
  std::optional<double> mean;
};

RecallResult mean_recall_g(const std::vector<ScoredTriplet>& predicted,
                           const std::vector<Triplet>& ground_truth);

struct ApResult {
  std::map<RelationType, double> per_category;
  std::vector<RelationType> zero_support;
  std::optional<double> mean;
};

// Average precision per relation category over the score-ranked triplets,
// using the all-points precision envelope; a category present in the ground
// truth but never predicted scores 0 and still enters the mean.
ApResult mean_ap_g(std::vector<ScoredTriplet> predicted,
                   const std::vector<Triplet>& ground_truth);

struct DlaConfig {
  std::size_t max_detections_per_page = 300;
};

struct DlaResult {
  std::vector<double> thresholds;          // 0.50, 0.55, ..., 0.95
  std::map<Category, double> per_category; // AP averaged over thresholds
  std::vector<Category> zero_support;
  std::optional<double> map;               // empty when there is no gt box
};

// Detection mAP over IoU thresholds 0.50:0.05:0.95 with greedy score-ordered
// matching (IoU >= t, one prediction per ground truth) and 101-point
// interpolated AP. Pages are paired by id; prediction pages without a
// ground-truth counterpart are ignored.
DlaResult dla_map(const std::vector<Page>& gt_pages,
                  const std::vector<Page>& pred_pages,
                  const DlaConfig& config = {});

// Dense pairwise relation scores: values[(i * instances + j) * channels + c].
struct RelationScores {
  std::size_t instances = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  double& at(std::size_t i, std::size_t j, std::size_t c) {
    return values[(i * instances + j) * channels + c];
  }
  double at(std::size_t i, std::size_t j, std::size_t c) const {
    return values[(i * instances + j) * channels + c];
  }
};

// Dense pairwise existence scores: values[i * instances + j].
struct ExistenceScores {
  std::size_t instances = 0;
  std::vector<double> values;

  double& at(std::size_t i, std::size_t j) { return values[i * instances + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * instances + j]; }
};

// fused[i][j][c] = relation[i][j][c] * existence[i][j]. Throws
// std::invalid_argument when the pairwise dimensions differ.
RelationScores fuse_auxiliary(const RelationScores& relation,
                              const ExistenceScores& existence);

// Sparse counterpart for prediction files: every scored edge carrying an
// existence value has its score multiplied by it.
void fuse_existence_scores(Page& prediction);

struct CategoryRelationMetric {
  std::size_t support = 0;
  std::size_t true_positives = 0;
  std::size_t predictions = 0;
  double recall = 0.0;
  double ap = 0.0;
};

struct RelationMetricReport {
  double t_r = 0.5;
  std::map<RelationType, CategoryRelationMetric> per_category;
  std::vector<RelationType> zero_support;
  std::optional<double> mr_g;
  std::optional<double> map_g;
};

struct EvalConfig {
  double t_iou = 0.5;
  std::vector<double> rel_thresholds = {0.5};
  std::size_t max_detections_per_page = 300;
  bool fuse_existence = false;
  unsigned jobs = 0;  // 0 = hardware concurrency
};

struct MetricReport {
  double t_iou = 0.5;
  std::vector<RelationMetricReport> relation_reports;  // one per threshold
  DlaResult dla;
};

// Full corpus evaluation: one instance matching per page (shared across all
// relation thresholds), relation metrics over page-qualified triplets, and
// detection mAP. Pages are paired by id.
MetricReport evaluate(const Dataset& gt, const Dataset& pred, const EvalConfig& config = {});

}  // namespace docgraph
