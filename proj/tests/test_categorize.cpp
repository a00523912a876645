#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "mfpkit/categorize.hpp"
#include "mfpkit/error.hpp"
#include "mfpkit/glm.hpp"
#include "support.hpp"

using namespace mfpkit;
using Catch::Approx;

TEST_CASE("median split", "[categorize]") {
  std::vector<double> x(100);
  for (std::size_t i = 0; i < 100; ++i) x[i] = static_cast<double>(i + 1);
  const auto q = cut_by_quantiles(x, 2);
  REQUIRE(q.scheme.cutpoints.size() == 1);
  CHECK(q.scheme.cutpoints[0] == Approx(50.5));
  CHECK(q.group_sizes == std::vector<std::size_t>{50, 50});
}

TEST_CASE("quartile groups on skewed data", "[categorize]") {
  Rng rng = make_stream(121, 0);
  std::vector<double> x(403);
  for (auto& v : x) v = std::exp(2.0 * standard_normal(rng));
  const auto q = cut_by_quantiles(x, 4);
  REQUIRE(q.group_sizes.size() == 4);
  for (const auto s : q.group_sizes) CHECK(std::abs(static_cast<double>(s) - 403.0 / 4.0) <= 1.0);
  CHECK(q.warnings.empty());
}

TEST_CASE("tied quantiles collapse", "[categorize]") {
  std::vector<double> x(100, 1.0);
  for (std::size_t i = 90; i < 100; ++i) x[i] = static_cast<double>(i);
  const auto q = cut_by_quantiles(x, 3);
  CHECK(q.scheme.cutpoints.size() < 2);
  CHECK_FALSE(q.warnings.empty());
  for (const auto s : q.group_sizes) CHECK(s > 0);
}

TEST_CASE("constant variable", "[categorize]") {
  const std::vector<double> x(20, 4.0);
  try {
    cut_by_quantiles(x, 2);
    FAIL();
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooFewDistinct);
  }
}

TEST_CASE("step outcome recovers its threshold", "[categorize]") {
  std::vector<double> x(100);
  std::vector<double> y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    x[i] = static_cast<double>(i);
    y[i] = (x[i] > 37.0 ? 2.0 : 0.0) + 0.01 * std::sin(static_cast<double>(i));
  }
  const auto r = min_p_cutpoint(test::make_data({x}, y), "x1");
  CHECK(r.cutpoint == Approx(37.5));
  CHECK(r.warning.find("overestimated") != std::string::npos);
}

TEST_CASE("minimum p is below every fixed cutpoint in range", "[categorize]") {
  Rng rng = make_stream(122, 0);
  const auto x = test::normals(rng, 120);
  auto y = test::normals(rng, 120);
  for (std::size_t i = 0; i < 120; ++i) y[i] += 0.3 * x[i];
  const auto data = test::make_data({x}, y);
  const auto r = min_p_cutpoint(data, "x1");
  CHECK(r.candidates == r.scan.size());
  for (const auto& [cut, p] : r.scan) {
    CHECK(r.naive_p <= p);
    CHECK(cutpoint_p_value(data, "x1", cut) == Approx(p).epsilon(1e-12));
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [cut, p] : r.scan) {
    const auto below = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), cut) - sorted.begin());
    CHECK(below >= 12);
    CHECK(below <= 108);
  }
}

TEST_CASE("cutpoint instability under resampling", "[categorize]") {
  Rng rng = make_stream(123, 0);
  const std::size_t n = 200;
  const auto x = test::normals(rng, n);
  auto y = test::normals(rng, n);
  for (std::size_t i = 0; i < n; ++i) y[i] += 0.4 * x[i];
  const auto data = test::make_data({x}, y);
  std::vector<double> cuts;
  for (std::size_t b = 0; b < 20; ++b) {
    Rng draw = make_stream(124, b);
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = uniform_index(draw, n);
    cuts.push_back(min_p_cutpoint(data.select_rows(rows), "x1").cutpoint);
  }
  const auto [lo, hi] = std::minmax_element(cuts.begin(), cuts.end());
  CHECK(*hi - *lo > 0.3);
}

TEST_CASE("empty search range", "[categorize]") {
  Rng rng = make_stream(125, 0);
  const auto data = test::make_data({test::normals(rng, 15)}, test::normals(rng, 15));
  try {
    min_p_cutpoint(data, "x1");
    FAIL();
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RangeEmpty);
  }
}

TEST_CASE("fitted group means do not depend on the reference group", "[categorize]") {
  Rng rng = make_stream(126, 0);
  const auto x = test::normals(rng, 150);
  auto y = test::normals(rng, 150);
  for (std::size_t i = 0; i < 150; ++i) y[i] += x[i] > 0.5 ? 1.0 : 0.0;
  const auto data = test::make_data({x}, y);
  auto q = cut_by_quantiles(x, 4);
  std::optional<Eigen::VectorXd> first;
  for (std::size_t r = 0; r < 4; ++r) {
    q.scheme.coding = DummyCoding{r};
    const ModelSpec spec{{q.scheme.term("x1")}};
    const auto f = fit(data, spec);
    const Eigen::VectorXd fitted = linear_predictor(data, spec, f);
    if (!first) {
      first = fitted;
    } else {
      CHECK((fitted - *first).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("type-I simulation", "[categorize]") {
  const auto wide = type1_simulation(100, 200, 0.05, {0.10, 0.90}, 7, Family::Gaussian, 1);
  CHECK(wide.replications == 200);
  CHECK(wide.rate > 0.15);
  CHECK(wide.mc_se == Approx(std::sqrt(wide.rate * (1 - wide.rate) / 200)));

  const auto narrow = type1_simulation(100, 200, 0.05, {0.40, 0.60}, 7, Family::Gaussian, 1);
  const auto middle = type1_simulation(100, 200, 0.05, {0.25, 0.75}, 7, Family::Gaussian, 1);
  CHECK(narrow.rate <= middle.rate);
  CHECK(middle.rate <= wide.rate);

  const auto again = type1_simulation(100, 200, 0.05, {0.10, 0.90}, 7, Family::Gaussian, 3);
  CHECK(again.rejections == wide.rejections);
  CHECK_THROWS_AS(type1_simulation(100, 50, 0.05, {}, 7), Error);

  const auto binary = type1_simulation(100, 100, 0.05, {0.10, 0.90}, 8, Family::Binomial, 1);
  CHECK(binary.rate > 0.1);
}
