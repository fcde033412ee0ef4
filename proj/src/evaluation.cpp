#include "docgraph/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "docgraph/parallel.hpp"

namespace docgraph {

InstanceMapping match_instances(const Page& gt, const Page& pred, double t_iou) {
  if (gt.width != pred.width || gt.height != pred.height) {
    throw std::invalid_argument("match_instances: page dimensions differ");
  }
  for (const LayoutInstance& instance : pred.instances) {
    if (!instance.score) {
      throw std::invalid_argument("match_instances: predicted instance without score");
    }
  }

  std::vector<const LayoutInstance*> preds;
  preds.reserve(pred.instances.size());
  for (const LayoutInstance& instance : pred.instances) {
    preds.push_back(&instance);
  }
  std::sort(preds.begin(), preds.end(), [](const LayoutInstance* a, const LayoutInstance* b) {
    return std::tie(*b->score, a->id) < std::tie(*a->score, b->id);
  });

  InstanceMapping mapping;
  std::map<int, double> assigned_iou;
  for (const LayoutInstance* prediction : preds) {
    // Best same-category ground truth by IoU; ties go to the lower id.
    const LayoutInstance* best = nullptr;
    double best_iou = 0.0;
    for (const LayoutInstance& candidate : gt.instances) {
      if (candidate.category != prediction->category) {
        continue;
      }
      const double overlap = iou(candidate.bbox, prediction->bbox);
      if (!best || overlap > best_iou || (overlap == best_iou && candidate.id < best->id)) {
        best = &candidate;
        best_iou = overlap;
      }
    }
    if (!best || best_iou <= t_iou) {
      continue;
    }
    // Displace only a strictly worse assignment; the loser is not re-queued.
    if (auto it = assigned_iou.find(best->id); it == assigned_iou.end() || best_iou > it->second) {
      mapping.gt_to_pred[best->id] = prediction->id;
      assigned_iou[best->id] = best_iou;
    }
  }
  for (const auto& [gt_id, pred_id] : mapping.gt_to_pred) {
    mapping.pred_to_gt[pred_id] = gt_id;
  }
  return mapping;
}

std::vector<ScoredTriplet> filter_relations(const std::vector<RelationEdge>& pred_edges,
                                            const InstanceMapping& mapping,
                                            double t_r) {
  std::vector<ScoredTriplet> kept;
  for (const RelationEdge& edge : pred_edges) {
    if (!edge.score) {
      throw std::invalid_argument("filter_relations: predicted relation without score");
    }
    if (*edge.score <= t_r) {
      continue;
    }
    const auto subject = mapping.pred_to_gt.find(edge.subject);
    const auto object = mapping.pred_to_gt.find(edge.object);
    if (subject == mapping.pred_to_gt.end() || object == mapping.pred_to_gt.end()) {
      continue;
    }
    kept.push_back({subject->second, edge.rel, object->second, *edge.score});
  }
  return kept;
}

namespace {

std::set<Triplet> triplet_set(const std::vector<Triplet>& triplets) {
  return {triplets.begin(), triplets.end()};
}

std::vector<RelationType> missing_categories(const std::set<Triplet>& ground_truth) {
  std::set<RelationType> present;
  for (const Triplet& triplet : ground_truth) {
    present.insert(triplet.predicate);
  }
  std::vector<RelationType> missing;
  for (RelationType rel : kAllRelationTypes) {
    if (!present.contains(rel)) {
      missing.push_back(rel);
    }
  }
  return missing;
}

std::optional<double> mean_of(const std::map<RelationType, double>& values) {
  if (values.empty()) {
    return std::nullopt;
  }
  double sum = 0.0;
  for (const auto& [rel, value] : values) {
    sum += value;
  }
  return sum / static_cast<double>(values.size());
}

}  // namespace

RecallResult mean_recall_g(const std::vector<ScoredTriplet>& predicted,
                           const std::vector<Triplet>& ground_truth) {
  const std::set<Triplet> gt = triplet_set(ground_truth);

  std::map<RelationType, std::size_t> support;
  for (const Triplet& triplet : gt) {
    ++support[triplet.predicate];
  }

  // Duplicate hits on one ground-truth triplet count once.
  std::set<Triplet> hit;
  for (const ScoredTriplet& triplet : predicted) {
    const Triplet key{triplet.subject, triplet.predicate, triplet.object};
    if (gt.contains(key)) {
      hit.insert(key);
    }
  }
  std::map<RelationType, std::size_t> hits_per_category;
  for (const Triplet& triplet : hit) {
    ++hits_per_category[triplet.predicate];
  }

  RecallResult result;
  for (const auto& [rel, total] : support) {
    const std::size_t hits = hits_per_category.count(rel) ? hits_per_category.at(rel) : 0;
    result.per_category[rel] = static_cast<double>(hits) / static_cast<double>(total);
  }
  result.zero_support = missing_categories(gt);
  result.mean = mean_of(result.per_category);
  return result;
}

ApResult mean_ap_g(std::vector<ScoredTriplet> predicted, const std::vector<Triplet>& ground_truth) {
  const std::set<Triplet> gt = triplet_set(ground_truth);

  std::map<RelationType, std::size_t> support;
  for (const Triplet& triplet : gt) {
    ++support[triplet.predicate];
  }

  // Descending score; equal scores keep their input order.
  std::stable_sort(predicted.begin(), predicted.end(),
                   [](const ScoredTriplet& a, const ScoredTriplet& b) { return a.score > b.score; });

  ApResult result;
  for (const auto& [rel, category_support] : support) {
    std::set<Triplet> claimed;
    std::vector<bool> is_tp;
    for (const ScoredTriplet& triplet : predicted) {
      if (triplet.predicate != rel) {
        continue;
      }
      const Triplet key{triplet.subject, triplet.predicate, triplet.object};
      is_tp.push_back(gt.contains(key) && claimed.insert(key).second);
    }

    // All-points interpolation: each true positive contributes its recall
    // step times the best precision at or beyond its rank.
    std::vector<double> precision(is_tp.size());
    std::size_t tp = 0;
    for (std::size_t i = 0; i < is_tp.size(); ++i) {
      tp += is_tp[i] ? 1 : 0;
      precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    }
    double ap = 0.0;
    double envelope = 0.0;
    for (std::size_t i = is_tp.size(); i-- > 0;) {
      envelope = std::max(envelope, precision[i]);
      if (is_tp[i]) {
        ap += envelope / static_cast<double>(category_support);
      }
    }
    result.per_category[rel] = ap;
  }
  result.zero_support = missing_categories(gt);
  result.mean = mean_of(result.per_category);
  return result;
}

namespace {

struct Detection {
  double score;
  std::size_t page_index;
  int id;
};

// 101-point interpolated AP over one category at one IoU threshold.
double ap_101(const std::vector<bool>& is_tp, std::size_t support) {
  std::vector<double> precision(is_tp.size());
  std::vector<double> recall(is_tp.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < is_tp.size(); ++i) {
    tp += is_tp[i] ? 1 : 0;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(support);
  }
  // Precision envelope from the right.
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double total = 0.0;
  std::size_t point = 0;
  for (int r = 0; r <= 100; ++r) {
    const double level = static_cast<double>(r) / 100.0;
    while (point < recall.size() && recall[point] < level) {
      ++point;
    }
    if (point < recall.size()) {
      total += precision[point];
    }
  }
  return total / 101.0;
}

}  // namespace

DlaResult dla_map(const std::vector<Page>& gt_pages, const std::vector<Page>& pred_pages,
                  const DlaConfig& config) {
  DlaResult result;
  for (int percent = 50; percent <= 95; percent += 5) {
    result.thresholds.push_back(static_cast<double>(percent) / 100.0);
  }

  std::unordered_map<int, const Page*> pred_by_id;
  for (const Page& page : pred_pages) {
    pred_by_id[page.id] = &page;
  }

  // Per page: ground-truth boxes by category, top-scoring detections.
  std::vector<std::map<Category, std::vector<const LayoutInstance*>>> gts(gt_pages.size());
  std::vector<std::map<Category, std::vector<const LayoutInstance*>>> dets(gt_pages.size());
  std::map<Category, std::size_t> support;
  for (std::size_t p = 0; p < gt_pages.size(); ++p) {
    for (const LayoutInstance& instance : gt_pages[p].instances) {
      gts[p][instance.category].push_back(&instance);
      ++support[instance.category];
    }
    const auto it = pred_by_id.find(gt_pages[p].id);
    if (it == pred_by_id.end()) {
      continue;
    }
    std::vector<const LayoutInstance*> page_dets;
    for (const LayoutInstance& instance : it->second->instances) {
      if (!instance.score) {
        throw std::invalid_argument("dla_map: predicted instance without score");
      }
      page_dets.push_back(&instance);
    }
    std::sort(page_dets.begin(), page_dets.end(),
              [](const LayoutInstance* a, const LayoutInstance* b) {
                return std::tie(*b->score, a->id) < std::tie(*a->score, b->id);
              });
    if (page_dets.size() > config.max_detections_per_page) {
      page_dets.resize(config.max_detections_per_page);
    }
    for (const LayoutInstance* instance : page_dets) {
      dets[p][instance->category].push_back(instance);
    }
  }

  for (Category category : kAllCategories) {
    if (!support.count(category)) {
      result.zero_support.push_back(category);
      continue;
    }
    double ap_sum = 0.0;
    for (const double threshold : result.thresholds) {
      // Greedy per-page matching, then one score-ranked sweep over all pages.
      std::vector<Detection> pool;
      std::vector<bool> matched_flags;
      for (std::size_t p = 0; p < gt_pages.size(); ++p) {
        const auto det_it = dets[p].find(category);
        if (det_it == dets[p].end()) {
          continue;
        }
        const auto gt_it = gts[p].find(category);
        const std::vector<const LayoutInstance*>* page_gts =
            gt_it == gts[p].end() ? nullptr : &gt_it->second;
        std::set<int> used;
        for (const LayoutInstance* det : det_it->second) {
          const LayoutInstance* best = nullptr;
          double best_iou = 0.0;
          if (page_gts) {
            for (const LayoutInstance* gt : *page_gts) {
              if (used.contains(gt->id)) {
                continue;
              }
              const double overlap = iou(gt->bbox, det->bbox);
              if (overlap >= threshold &&
                  (!best || overlap > best_iou || (overlap == best_iou && gt->id < best->id))) {
                best = gt;
                best_iou = overlap;
              }
            }
          }
          if (best) {
            used.insert(best->id);
          }
          pool.push_back({*det->score, p, det->id});
          matched_flags.push_back(best != nullptr);
        }
      }

      std::vector<std::size_t> ranking(pool.size());
      for (std::size_t i = 0; i < ranking.size(); ++i) {
        ranking[i] = i;
      }
      std::sort(ranking.begin(), ranking.end(), [&pool](std::size_t a, std::size_t b) {
        return std::tie(pool[b].score, pool[a].page_index, pool[a].id) <
               std::tie(pool[a].score, pool[b].page_index, pool[b].id);
      });
      std::vector<bool> is_tp(pool.size());
      for (std::size_t i = 0; i < ranking.size(); ++i) {
        is_tp[i] = matched_flags[ranking[i]];
      }
      ap_sum += ap_101(is_tp, support.at(category));
    }
    result.per_category[category] = ap_sum / static_cast<double>(result.thresholds.size());
  }

  if (!result.per_category.empty()) {
    double sum = 0.0;
    for (const auto& [category, ap] : result.per_category) {
      sum += ap;
    }
    result.map = sum / static_cast<double>(result.per_category.size());
  }
  return result;
}

RelationScores fuse_auxiliary(const RelationScores& relation, const ExistenceScores& existence) {
  if (relation.instances != existence.instances ||
      relation.values.size() != relation.instances * relation.instances * relation.channels ||
      existence.values.size() != existence.instances * existence.instances) {
    throw std::invalid_argument("fuse_auxiliary: pairwise dimensions differ");
  }
  RelationScores fused = relation;
  const std::size_t k = relation.channels;
  for (std::size_t pair = 0; pair < existence.values.size(); ++pair) {
    const double factor = existence.values[pair];
    for (std::size_t c = 0; c < k; ++c) {
      fused.values[pair * k + c] *= factor;
    }
  }
  return fused;
}

void fuse_existence_scores(Page& prediction) {
  for (RelationEdge& edge : prediction.relations) {
    if (edge.score && edge.existence) {
      edge.score = *edge.score * *edge.existence;
    }
  }
}

namespace {

// Page-qualified instance id, so triplets from different pages never collide.
std::int64_t global_id(std::size_t page_index, int instance_id) {
  return (static_cast<std::int64_t>(page_index) << 32) + instance_id;
}

}  // namespace

MetricReport evaluate(const Dataset& gt, const Dataset& pred, const EvalConfig& config) {
  std::unordered_map<int, const Page*> pred_by_id;
  for (const Page& page : pred.pages) {
    pred_by_id[page.id] = &page;
  }

  std::vector<Page> pred_pages = pred.pages;
  if (config.fuse_existence) {
    for (Page& page : pred_pages) {
      fuse_existence_scores(page);
    }
    pred_by_id.clear();
    for (const Page& page : pred_pages) {
      pred_by_id[page.id] = &page;
    }
  }

  // One matching per page, shared by every relation threshold.
  std::vector<InstanceMapping> mappings(gt.pages.size());
  std::vector<const Page*> paired(gt.pages.size(), nullptr);
  parallel_for(gt.pages.size(), config.jobs, [&](std::size_t p) {
    const Page& gt_page = gt.pages[p];
    const auto it = pred_by_id.find(gt_page.id);
    if (it == pred_by_id.end()) {
      Page empty;
      empty.id = gt_page.id;
      empty.width = gt_page.width;
      empty.height = gt_page.height;
      mappings[p] = match_instances(gt_page, empty, config.t_iou);
    } else {
      paired[p] = it->second;
      mappings[p] = match_instances(gt_page, *it->second, config.t_iou);
    }
  });

  std::vector<Triplet> gt_triplets;
  for (std::size_t p = 0; p < gt.pages.size(); ++p) {
    for (const RelationEdge& edge : gt.pages[p].relations) {
      gt_triplets.push_back({global_id(p, edge.subject), edge.rel, global_id(p, edge.object)});
    }
  }

  MetricReport report;
  report.t_iou = config.t_iou;
  for (const double t_r : config.rel_thresholds) {
    std::vector<ScoredTriplet> kept;
    for (std::size_t p = 0; p < gt.pages.size(); ++p) {
      if (!paired[p]) {
        continue;
      }
      for (ScoredTriplet triplet : filter_relations(paired[p]->relations, mappings[p], t_r)) {
        triplet.subject = global_id(p, static_cast<int>(triplet.subject));
        triplet.object = global_id(p, static_cast<int>(triplet.object));
        kept.push_back(triplet);
      }
    }

    const RecallResult recall = mean_recall_g(kept, gt_triplets);
    const ApResult ap = mean_ap_g(kept, gt_triplets);

    RelationMetricReport relation_report;
    relation_report.t_r = t_r;
    relation_report.zero_support = recall.zero_support;
    relation_report.mr_g = recall.mean;
    relation_report.map_g = ap.mean;

    std::map<RelationType, std::size_t> support;
    std::set<Triplet> gt_set(gt_triplets.begin(), gt_triplets.end());
    for (const Triplet& triplet : gt_set) {
      ++support[triplet.predicate];
    }
    std::map<RelationType, std::size_t> predicted_counts;
    for (const ScoredTriplet& triplet : kept) {
      ++predicted_counts[triplet.predicate];
    }
    for (const auto& [rel, recall_value] : recall.per_category) {
      CategoryRelationMetric metric;
      metric.support = support.at(rel);
      metric.recall = recall_value;
      metric.ap = ap.per_category.at(rel);
      metric.true_positives =
          static_cast<std::size_t>(std::llround(recall_value * static_cast<double>(metric.support)));
      metric.predictions = predicted_counts.count(rel) ? predicted_counts.at(rel) : 0;
      relation_report.per_category[rel] = metric;
    }
    report.relation_reports.push_back(std::move(relation_report));
  }

  report.dla = dla_map(gt.pages, pred_pages, DlaConfig{config.max_detections_per_page});
  return report;
}

}  // namespace docgraph
