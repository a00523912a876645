#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mfpkit/error.hpp"
#include "mfpkit/fsp.hpp"
#include "support.hpp"

using namespace mfpkit;

namespace {

Dataset one_covariate(std::uint64_t seed, std::size_t n, double (*f)(double), double noise = 0.3) {
  Rng rng = make_stream(seed, 0);
  const auto x = test::uniforms(rng, n, 0.1, 6.0);
  auto y = test::normals(rng, n, 0.0, noise);
  for (std::size_t i = 0; i < n; ++i) y[i] += f(x[i]);
  return test::make_data({x}, y);
}

}  // namespace

TEST_CASE("degrees of freedom per step", "[fsp]") {
  CHECK(fsp_degrees_of_freedom(2) == std::vector<int>{4, 3, 2});
  CHECK(fsp_degrees_of_freedom(1) == std::vector<int>{2, 1});
  CHECK_THROWS_AS(fsp_degrees_of_freedom(3), Error);
}

TEST_CASE("closed test verdicts", "[fsp]") {
  SECTION("null relation") {
    const auto d = fsp_select(one_covariate(31, 200, [](double) { return 0.0; }), "x1", 0.05, 2, ModelSpec{});
    CHECK(d.verdict == Verdict::Excluded);
    CHECK(d.steps.size() == 1);
    CHECK(d.steps[0].df == 4);
    CHECK_FALSE(decision_term(d).has_value());
  }
  SECTION("linear relation") {
    const auto d = fsp_select(one_covariate(32, 300, [](double x) { return 0.5 * x; }), "x1", 0.05, 2, ModelSpec{});
    CHECK(d.verdict == Verdict::Linear);
    CHECK(decision_term(d) == linear_term("x1"));
    CHECK(d.steps.size() == 2);
  }
  SECTION("log relation") {
    const auto d = fsp_select(one_covariate(33, 400, [](double x) { return 2.0 * std::log(x); }), "x1", 0.05, 2,
                              ModelSpec{});
    CHECK(d.verdict >= Verdict::Fp1);
    REQUIRE(d.powers);
    CHECK(d.powers->contains(0.0));
  }
  SECTION("non-monotone relation needs FP2") {
    const auto d = fsp_select(one_covariate(34, 400, [](double x) { return (x - 3.0) * (x - 3.0); }), "x1", 0.05, 2,
                              ModelSpec{});
    CHECK(d.verdict == Verdict::Fp2);
    CHECK(d.steps.size() == 3);
  }
}

TEST_CASE("recorded steps replay the verdict", "[fsp]") {
  for (std::uint64_t s = 40; s < 60; ++s) {
    const auto d = fsp_select(one_covariate(s, 150, [](double x) { return 0.2 * std::sqrt(x); }, 1.0), "x1", 0.05, 2,
                              ModelSpec{});
    CHECK(replay_verdict(d) == d.verdict);
    for (const auto& step : d.steps) CHECK(step.alpha == 0.05);
  }
}

TEST_CASE("deviances are ordered along the closed test", "[fsp]") {
  const auto d = fsp_select(one_covariate(61, 200, [](double x) { return std::log(x); }), "x1", 0.05, 2, ModelSpec{});
  CHECK(d.deviance_fp2 <= d.deviance_fp1 + 1e-9);
  CHECK(d.deviance_fp1 <= d.deviance_linear + 1e-9);
  CHECK(d.deviance_linear <= d.deviance_null + 1e-9);
}

TEST_CASE("few distinct values get a linear test only", "[fsp]") {
  Rng rng = make_stream(62, 0);
  const std::size_t n = 120;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i % 3);
  auto y = test::normals(rng, n);
  for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
  const auto d = fsp_select(test::make_data({x}, y), "x1", 0.05, 2, ModelSpec{});
  CHECK(d.linear_only);
  CHECK(d.verdict == Verdict::Linear);
  CHECK(d.steps.size() == 1);
  CHECK(d.steps[0].df == 1);

  std::vector<double> constant(n, 2.0);
  CHECK_THROWS_AS(fsp_select(test::make_data({constant}, y), "x1", 0.05, 2, ModelSpec{}), Error);
}

TEST_CASE("force_in never excludes", "[fsp]") {
  auto options = FspOptions::uniform(0.05);
  options.force_in = true;
  const auto d = fsp_select(one_covariate(63, 100, [](double) { return 0.0; }, 1.0), "x1", options, ModelSpec{});
  CHECK(d.verdict != Verdict::Excluded);
}

TEST_CASE("degree-one closed test", "[fsp]") {
  const auto d = fsp_select(one_covariate(64, 300, [](double x) { return 1.0 / x; }), "x1", 0.05, 1, ModelSpec{});
  CHECK(d.verdict == Verdict::Fp1);
  CHECK(d.steps.size() == 2);
  CHECK(d.steps[0].df == 2);
  CHECK_FALSE(d.best_fp2.has_value());
}

TEST_CASE("lowering alpha never adds complexity", "[fsp]") {
  for (std::uint64_t s = 70; s < 90; ++s) {
    const auto data = one_covariate(s, 150, [](double x) { return 0.15 * x * x; }, 1.5);
    Verdict previous = Verdict::Fp2;
    for (const double alpha : {0.5, 0.2, 0.05, 0.01, 0.001}) {
      const auto v = fsp_select(data, "x1", alpha, 2, ModelSpec{}).verdict;
      CHECK(v <= previous);
      previous = v;
    }
  }
}

TEST_CASE("quadratic relation is an FP1 with power 2", "[fsp]") {
  const auto d = fsp_select(one_covariate(91, 250, [](double x) { return x * x; }, 0.1), "x1", 0.05, 2, ModelSpec{});
  CHECK(d.verdict == Verdict::Fp1);
  REQUIRE(d.powers);
  CHECK(*d.powers == FpPowers(2.0));
}

TEST_CASE("strong linear slope is rarely called nonlinear", "[fsp]") {
  int nonlinear = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto d = fsp_select(one_covariate(1000 + s, 250, [](double x) { return 3.0 * x; }, 1.0), "x1", 0.05, 2,
                              ModelSpec{});
    REQUIRE(d.verdict != Verdict::Excluded);
    nonlinear += d.verdict >= Verdict::Fp1;
  }
  CHECK(nonlinear <= 20);
}
