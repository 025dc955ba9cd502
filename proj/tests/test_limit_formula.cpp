#include <doctest.h>

#include <nlohmann/json.hpp>
#include <set>

#include "covspec/errors.hpp"
#include "covspec/limit_formula.hpp"

using namespace covspec;

TEST_CASE("tree counts follow Cayley's formula") {
  CHECK(enumerate_trees(1).size() == 1);
  CHECK(enumerate_trees(2).size() == 1);
  CHECK(enumerate_trees(3).size() == 3);
  CHECK(enumerate_trees(4).size() == 16);
  CHECK(enumerate_trees(5).size() == 125);

  std::set<std::vector<std::pair<int, int>>> distinct;
  for (const auto& tree : enumerate_trees(4)) distinct.insert(tree.edges);
  CHECK(distinct.size() == 16);
  CHECK_THROWS_AS(enumerate_trees(9), ValidationError);
}

TEST_CASE("compositions enumerate ordered partitions") {
  CHECK(compositions(3, 1).size() == 1);
  CHECK(compositions(3, 2).size() == 2);  // (1,2), (2,1)
  CHECK(compositions(5, 3).size() == 6);
  for (const auto& nu : compositions(5, 3)) {
    int sum = 0;
    for (int part : nu.parts) {
      CHECK(part >= 1);
      sum += part;
    }
    CHECK(sum == 5);
  }
}

TEST_CASE("interval powers from labeled words") {
  CHECK(s_powers({{1, 1}}, 1) == std::vector<int>{2});
  CHECK(s_powers({{1}, {1}}, 1) == std::vector<int>{1});
  CHECK(s_powers({{1}, {1, 2}}, 2) == std::vector<int>{1, 1});
  // Rotating a non-head word changes which entry is dropped.
  CHECK(s_powers({{1}, {2, 1}}, 2) == std::vector<int>{2, 0});
}

TEST_CASE("class coefficient base cases") {
  CHECK(class_coefficient(1, {{2}}, {{1, 1}}, 1, CoefficientMode::kStabilizer) == 1);
  CHECK(class_coefficient(2, {{1, 1}}, {{1}, {1}}, 1, CoefficientMode::kStabilizer) == 1);
  CHECK(class_coefficient(2, {{1, 1}}, {{2}, {2}}, 2, CoefficientMode::kStabilizer) == 1);
  // Mixed colors cannot connect: the indicator kills the only tree.
  CHECK(class_coefficient(2, {{1, 1}}, {{1}, {2}}, 2, CoefficientMode::kStabilizer) == 0);
  // The r=3 equal-words slot evaluates to zero in either mode even though the
  // enumeration finds one class.
  CHECK(class_coefficient(3, {{1, 1, 1}}, {{1}, {1}, {1}}, 1, CoefficientMode::kStabilizer) == 0);
}

TEST_CASE("literal mode divides by zero for r <= 2") {
  CHECK_THROWS_AS(class_coefficient(1, {{2}}, {{1, 1}}, 1, CoefficientMode::kLiteral),
                  ValidationError);
  CHECK_THROWS_AS(class_coefficient(2, {{1, 1}}, {{1}, {1}}, 1, CoefficientMode::kLiteral),
                  ValidationError);
  try {
    class_coefficient(1, {{1}}, {{1}}, 1, CoefficientMode::kLiteral);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("literal") != std::string::npos);
    CHECK(std::string(e.what()).find("division by zero") != std::string::npos);
  }
}

TEST_CASE("stabilizer coefficient is invariant under tail relabeling") {
  // Swapping components 2..r of (nu, words) must not change the coefficient.
  const Rational base =
      class_coefficient(3, {{2, 1, 2}}, {{1, 2}, {1}, {2, 2}}, 2, CoefficientMode::kStabilizer);
  const Rational swapped =
      class_coefficient(3, {{2, 2, 1}}, {{1, 2}, {2, 2}, {1}}, 2, CoefficientMode::kStabilizer);
  CHECK(base == swapped);
}

TEST_CASE("closed form k=1 equals the weighted first moment") {
  ConstantMixedMoments ones(1.0, 2);
  const double v = closed_form_moment(1, 0.7, {0.25, 0.75}, ones, CoefficientMode::kStabilizer);
  CHECK(v == doctest::Approx(1.0));
  AnalyticMixedMoments table({{{1}, 2.0}, {{2}, 3.0}}, 2);
  const double w = closed_form_moment(1, 0.7, {0.25, 0.75}, table, CoefficientMode::kStabilizer);
  CHECK(w == doctest::Approx(0.25 * 2.0 + 0.75 * 3.0));
}

TEST_CASE("closed form k=2 matches the known polynomial") {
  ConstantMixedMoments ones(1.0, 1);
  for (double c : {0.0, 0.5, 1.0, 2.0}) {
    const double v = closed_form_moment(2, c, {1.0}, ones, CoefficientMode::kStabilizer);
    CHECK(v == doctest::Approx(1.0 + c));
  }
  CHECK_THROWS_AS(closed_form_moment(2, 0.5, {1.0}, ones, CoefficientMode::kLiteral),
                  ValidationError);
}

TEST_CASE("c=0 keeps exactly the r=1 portion") {
  const MomentExpansion e = closed_form_expansion(3, 2, CoefficientMode::kStabilizer);
  AnalyticMixedMoments table(
      {{{1}, 1.5}, {{2}, 0.5}, {{1, 2}, 0.75}, {{1, 1}, 2.25}, {{2, 2}, 0.3},
       {{1, 1, 1}, 3.0}, {{1, 1, 2}, 1.1}, {{1, 2, 2}, 0.6}, {{2, 2, 2}, 0.2}},
      2);
  const std::vector<double> deltas = {0.4, 0.6};
  const double at_zero = evaluate_expansion(e, 0.0, deltas, table);
  // Independent route: sum over all words of dt powers times the word moment.
  double expected = 0.0;
  for (int w = 0; w < 8; ++w) {
    MixedMomentKey word = {1 + (w & 1), 1 + ((w >> 1) & 1), 1 + ((w >> 2) & 1)};
    double dt = 1.0;
    for (int l : word) dt *= deltas[static_cast<size_t>(l - 1)];
    expected += dt * mixed_moment(table, word);
  }
  CHECK(at_zero == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("audit: formula matches oracle exactly for k <= 2, m <= 3") {
  for (int m = 1; m <= 3; ++m)
    for (int k = 1; k <= 2; ++k) {
      const AuditReport report = compare_formula_oracle(k, m, CoefficientMode::kStabilizer);
      CHECK(report.matches);
      CHECK(report.diffs.empty());
    }
}

TEST_CASE("audit: k=3, m=1 has exactly the known discrepancy") {
  const AuditReport report = compare_formula_oracle(3, 1, CoefficientMode::kStabilizer);
  CHECK_FALSE(report.matches);
  REQUIRE(report.diffs.size() == 1);
  const AuditDiff& diff = report.diffs[0];
  CHECK(diff.r == 3);
  CHECK(diff.nu == std::vector<int>{1, 1, 1});
  CHECK(diff.formula_coeff == 0);
  CHECK(diff.oracle_coeff == 1);
}

TEST_CASE("audit json round trips the diff fields") {
  const AuditReport report = compare_formula_oracle(3, 1, CoefficientMode::kStabilizer);
  const auto j = audit_to_json(report);
  CHECK(j.at("matches") == false);
  CHECK(j.at("diffs").size() == 1);
  CHECK(j.at("diffs")[0].at("formula_coeff") == "0");
  CHECK(j.at("diffs")[0].at("oracle_coeff") == "1");
}
