#include <atomic>
#include <random>
#include <stdexcept>
#include <vector>

#include "docgraph/parallel.hpp"
#include "docgraph/types.hpp"
#include "docgraph/validate.hpp"
#include "doctest.h"
#include "synthetic.hpp"

using namespace docgraph;
namespace ts = docgraph::testsupport;

namespace {

Page single_instance_page() {
  Page page;
  page.id = 0;
  page.width = 100;
  page.height = 100;
  page.instances.push_back({0, {10, 10, 20, 20}, Category::Text, std::nullopt, std::nullopt});
  return page;
}

std::size_t count_kind(const ValidationReport& report, ViolationKind kind) {
  std::size_t n = 0;
  for (const Violation& violation : report.violations) {
    n += violation.kind == kind ? 1 : 0;
  }
  return n;
}

}  // namespace

TEST_SUITE_BEGIN("core");

TEST_CASE("iou basics") {
  const BoundingBox b{3, 4, 10, 12};
  CHECK(iou(b, b) == 1.0);
  CHECK(iou({0, 0, 10, 10}, {20, 20, 5, 5}) == 0.0);
  // inter = 2, union = 6
  CHECK(iou({0, 0, 2, 2}, {1, 0, 2, 2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("iou properties on random boxes") {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    const BoundingBox a{double(ts::rand_int(rng, 0, 80)), double(ts::rand_int(rng, 0, 80)),
                        double(ts::rand_int(rng, 1, 40)), double(ts::rand_int(rng, 1, 40))};
    const BoundingBox b{double(ts::rand_int(rng, 0, 80)), double(ts::rand_int(rng, 0, 80)),
                        double(ts::rand_int(rng, 1, 40)), double(ts::rand_int(rng, 1, 40))};
    const double v = iou(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(iou(b, a) == v);
    CHECK(iou(a, a) == 1.0);
    // translation invariance
    const double tx = ts::rand_int(rng, -5, 5);
    const double ty = ts::rand_int(rng, -5, 5);
    const BoundingBox at{a.x + tx, a.y + ty, a.w, a.h};
    const BoundingBox bt{b.x + tx, b.y + ty, b.w, b.h};
    CHECK(iou(at, bt) == v);
  }
}

TEST_CASE("category and relation names round-trip") {
  for (Category category : kAllCategories) {
    CHECK(category_from_string(to_string(category)) == category);
  }
  for (RelationType rel : kAllRelationTypes) {
    CHECK(relation_from_string(to_string(rel)) == rel);
    CHECK(is_spatial(rel) != is_logical(rel));
  }
  CHECK(!category_from_string("Header2").has_value());
  CHECK(is_spatial(RelationType::Up));
  CHECK(is_logical(RelationType::Reference));
}

TEST_CASE("validate_page accepts a simple page") {
  CHECK(validate_page(single_instance_page()).ok());
}

TEST_CASE("validate_page flags overlapping boxes with both ids") {
  Page page = single_instance_page();
  page.instances.push_back({1, {15, 15, 20, 20}, Category::Text, std::nullopt, std::nullopt});
  const ValidationReport report = validate_page(page);
  REQUIRE(count_kind(report, ViolationKind::Overlap) == 1);
  for (const Violation& violation : report.violations) {
    if (violation.kind == ViolationKind::Overlap) {
      CHECK(violation.ids == std::vector<int>{0, 1});
    }
  }
}

TEST_CASE("touching boxes are not overlap") {
  Page page = single_instance_page();
  page.instances.push_back({1, {30, 10, 20, 20}, Category::Text, std::nullopt, std::nullopt});
  CHECK(validate_page(page).ok());
}

TEST_CASE("validate_page flags dangling endpoints") {
  Page page = single_instance_page();
  page.relations.push_back({0, 42, RelationType::Down, std::nullopt, std::nullopt});
  const ValidationReport report = validate_page(page);
  CHECK(count_kind(report, ViolationKind::DanglingEndpoint) == 1);
}

TEST_CASE("one corrupted invariant produces exactly its violation class") {
  SUBCASE("zero-area box") {
    Page page = single_instance_page();
    page.instances[0].bbox.w = 0;
    const ValidationReport report = validate_page(page);
    CHECK(report.violations.size() == 1);
    CHECK(count_kind(report, ViolationKind::InvalidBox) == 1);
  }
  SUBCASE("box beyond the page") {
    Page page = single_instance_page();
    page.instances[0].bbox.x = 95;
    const ValidationReport report = validate_page(page);
    CHECK(report.violations.size() == 1);
    CHECK(count_kind(report, ViolationKind::OutOfBounds) == 1);
  }
  SUBCASE("duplicate instance id") {
    Page page = single_instance_page();
    page.instances.push_back({0, {50, 50, 10, 10}, Category::Text, std::nullopt, std::nullopt});
    const ValidationReport report = validate_page(page);
    CHECK(report.violations.size() == 1);
    CHECK(count_kind(report, ViolationKind::DuplicateInstanceId) == 1);
  }
  SUBCASE("self relation") {
    Page page = single_instance_page();
    page.relations.push_back({0, 0, RelationType::Sequence, std::nullopt, std::nullopt});
    const ValidationReport report = validate_page(page);
    CHECK(report.violations.size() == 1);
    CHECK(count_kind(report, ViolationKind::SelfRelation) == 1);
  }
  SUBCASE("duplicate relation triple") {
    Page page = single_instance_page();
    page.instances.push_back({1, {50, 50, 10, 10}, Category::Text, std::nullopt, std::nullopt});
    page.relations.push_back({0, 1, RelationType::Down, std::nullopt, std::nullopt});
    page.relations.push_back({0, 1, RelationType::Down, std::nullopt, std::nullopt});
    const ValidationReport report = validate_page(page);
    CHECK(report.violations.size() == 1);
    CHECK(count_kind(report, ViolationKind::DuplicateRelation) == 1);
  }
  SUBCASE("same pair with different types is fine") {
    Page page = single_instance_page();
    page.instances.push_back({1, {50, 50, 10, 10}, Category::Text, std::nullopt, std::nullopt});
    page.relations.push_back({0, 1, RelationType::Down, std::nullopt, std::nullopt});
    page.relations.push_back({0, 1, RelationType::Sequence, std::nullopt, std::nullopt});
    CHECK(validate_page(page).ok());
  }
  SUBCASE("score out of range") {
    Page page = single_instance_page();
    page.instances[0].score = 1.5;
    const ValidationReport report = validate_page(page);
    CHECK(report.violations.size() == 1);
    CHECK(count_kind(report, ViolationKind::ScoreOutOfRange) == 1);
  }
}

TEST_CASE("prediction profile allows overlap but wants scores") {
  Page page = single_instance_page();
  page.instances.push_back({1, {15, 15, 20, 20}, Category::Text, std::nullopt, std::nullopt});
  const ValidationReport report = validate_prediction_page(page);
  CHECK(count_kind(report, ViolationKind::Overlap) == 0);
  CHECK(count_kind(report, ViolationKind::MissingScore) == 2);
}

TEST_CASE("parallel_for visits every index once and propagates failures") {
  std::vector<std::atomic<int>> visits(257);
  for (auto& v : visits) {
    v = 0;
  }
  parallel_for(visits.size(), 4, [&](std::size_t i) { ++visits[i]; });
  for (const auto& v : visits) {
    CHECK(v == 1);
  }

  CHECK_THROWS_AS(parallel_for(100, 4,
                               [](std::size_t i) {
                                 if (i == 57) {
                                   throw std::runtime_error("worker failure");
                                 }
                               }),
                  std::runtime_error);
}

TEST_SUITE_END();
