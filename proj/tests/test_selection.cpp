#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include <cmath>

#include "mfpkit/error.hpp"
#include "mfpkit/selection.hpp"
#include "support.hpp"

using namespace mfpkit;
using Catch::Approx;

namespace {

// y = x1 + 0.5 x2 + noise, x3..x5 unrelated.
Dataset five_covariates(std::uint64_t seed, std::size_t n = 300) {
  Rng rng = make_stream(seed, 0);
  std::vector<std::vector<double>> xs;
  for (int j = 0; j < 5; ++j) xs.push_back(test::normals(rng, n));
  auto y = test::normals(rng, n);
  for (std::size_t i = 0; i < n; ++i) y[i] += xs[0][i] + 0.5 * xs[1][i];
  return test::make_data(xs, y);
}

ModelSpec all_linear(int p) {
  ModelSpec s;
  for (int j = 1; j <= p; ++j) s.terms.push_back(linear_term("x" + std::to_string(j)));
  return s;
}

}  // namespace

TEST_CASE("criterion thresholds", "[selection]") {
  CHECK(criterion_threshold(Criterion::aic(), 100) == Approx(0.1573).margin(5e-4));
  CHECK(criterion_threshold(Criterion::bic(), 100) == Approx(0.032).margin(5e-4));
  CHECK(criterion_threshold(Criterion::bic(), 400) == Approx(0.014).margin(5e-4));
  CHECK(criterion_threshold(Criterion::p_value(0.01), 100) == 0.01);
  CHECK(Criterion::bic().penalty(100) == Approx(std::log(100.0)));
  CHECK(parse_criterion("aic", 0.05).kind == CriterionKind::Aic);
  CHECK(parse_criterion("p", 0.1).alpha == 0.1);
  CHECK_THROWS_AS(parse_criterion("cp", 0.05), Error);
}

TEST_CASE("backward elimination keeps the true predictors", "[selection]") {
  const auto data = five_covariates(81);
  const auto trace = backward_eliminate(data, all_linear(5), Criterion::p_value(0.01));
  const auto vars = trace.final_spec.variables();
  CHECK(std::find(vars.begin(), vars.end(), "x1") != vars.end());
  CHECK(std::find(vars.begin(), vars.end(), "x2") != vars.end());
  for (const auto& step : trace.steps) {
    CHECK(step.action == StepAction::Drop);
    CHECK(step.p_value > step.threshold);
    CHECK(std::isnan(step.criterion_delta));
  }
  CHECK(replay_steps(trace.start_spec, trace.steps) == trace.final_spec);
}

TEST_CASE("forward selection and stepwise reach the same model here", "[selection]") {
  const auto data = five_covariates(82);
  const auto candidates = all_linear(5).terms;
  const auto fs = forward_select(data, candidates, Criterion::aic());
  const auto sw = stepwise(data, candidates, Criterion::aic());
  auto a = fs.final_spec.variables();
  auto b = sw.final_spec.variables();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK(fs.steps.front().term == "x1");
  CHECK(replay_steps(fs.start_spec, fs.steps, candidates) == fs.final_spec);
}

TEST_CASE("stepwise requires entry not to exceed removal", "[selection]") {
  const auto data = five_covariates(83);
  CHECK_THROWS_AS(stepwise(data, all_linear(5).terms, Criterion::p_value(0.2), Criterion::p_value(0.1)), Error);
}

TEST_CASE("forced terms stay", "[selection]") {
  const auto data = five_covariates(84);
  SelectionOptions options;
  options.force_in = {"x5"};
  const auto trace = backward_eliminate(data, all_linear(5), Criterion::p_value(0.05), options);
  CHECK(trace.final_spec.find_variable("x5").has_value());
}

TEST_CASE("information criteria deltas", "[selection]") {
  const auto data = five_covariates(85);
  const auto trace = backward_eliminate(data, all_linear(5), Criterion::bic());
  for (const auto& step : trace.steps) CHECK(step.criterion_delta < 0.0);
}

TEST_CASE("augmented BE keeps a confounder", "[selection]") {
  Rng rng = make_stream(86, 0);
  const std::size_t n = 200;
  const auto c = test::normals(rng, n);
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = c[i] + 0.3 * standard_normal(rng);
  auto y = test::normals(rng, n, 0.0, 3.0);
  for (std::size_t i = 0; i < n; ++i) y[i] += 0.5 * e[i] + 0.35 * c[i];
  const auto noise = test::normals(rng, n);
  const auto data = test::make_data({e, c, noise}, y);
  const auto trace = augmented_backward_eliminate(data, all_linear(3), 0.01, "x1", 0.5);
  CHECK(trace.final_spec.find_variable("x1").has_value());
  CHECK_THROWS_AS(augmented_backward_eliminate(data, all_linear(3), 0.05, "x9", 0.5), Error);
}

TEST_CASE("dummy blocks are tested jointly", "[selection]") {
  Rng rng = make_stream(87, 0);
  const std::size_t n = 200;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(i % 4);
  auto y = test::normals(rng, n);
  for (std::size_t i = 0; i < n; ++i) y[i] += g[i] == 3.0 ? 1.0 : 0.0;
  const auto data = test::make_data({g}, y);
  const Term cat{"x1", CategoricalTransform{{0.5, 1.5, 2.5}, DummyCoding{0}}};
  const auto full = fit(data, ModelSpec{{cat}});
  const auto tests = removal_tests(data, ModelSpec{{cat}}, full);
  REQUIRE(tests.size() == 1);
  CHECK(tests[0].df == 3);
  const auto dummies = split_dummies(cat);
  CHECK(dummies.size() == 3);
  CHECK(dummies[0].width() == 1);

  auto has_dummy_warning = [](const SelectionTrace& t) {
    return std::any_of(t.warnings.begin(), t.warnings.end(),
                       [](const std::string& w) { return w.find("individually") != std::string::npos; });
  };
  CHECK(has_dummy_warning(backward_eliminate(data, ModelSpec{dummies}, Criterion::p_value(0.05))));
  CHECK(has_dummy_warning(forward_select(data, dummies, Criterion::p_value(0.05))));
  CHECK_FALSE(has_dummy_warning(backward_eliminate(data, ModelSpec{{cat}}, Criterion::p_value(0.05))));
}

TEST_CASE("univariable screening carries a warning", "[selection]") {
  const auto data = five_covariates(88);
  const auto s = univariable_screen(data, all_linear(5).terms, 0.05);
  CHECK_FALSE(s.warning.empty());
  CHECK(s.p_values.size() == 5);
}
