#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mfpkit/error.hpp"
#include "mfpkit/mfp.hpp"
#include "support.hpp"

using namespace mfpkit;

namespace {

Dataset mfp_data(std::uint64_t seed, std::size_t n = 400) {
  Rng rng = make_stream(seed, 0);
  const auto x1 = test::uniforms(rng, n, 0.1, 5.0);
  const auto x2 = test::normals(rng, n);
  const auto x3 = test::normals(rng, n);
  std::vector<double> x4(n);
  for (auto& v : x4) v = uniform01(rng) < 0.4 ? 1.0 : 0.0;
  auto y = test::normals(rng, n, 0.0, 0.5);
  for (std::size_t i = 0; i < n; ++i) y[i] += std::log(x1[i]) + 0.5 * x2[i] + 0.4 * x4[i];
  return test::make_data({x1, x2, x3, x4}, y);
}

}  // namespace

TEST_CASE("mfp recovers the generating structure", "[mfp]") {
  const auto data = mfp_data(91);
  const auto res = mfp(data, {"x1", "x2", "x3", "x4"});
  CHECK(res.converged);
  const auto& d1 = res.decisions.at("x1");
  CHECK(d1.function.verdict >= Verdict::Fp1);
  REQUIRE(d1.function.powers);
  CHECK(d1.function.powers->contains(0.0));
  CHECK(res.decisions.at("x2").function.verdict == Verdict::Linear);
  CHECK(res.decisions.at("x4").kind == VariableKind::Binary);
  CHECK(res.decisions.at("x4").included());
  CHECK(res.cycle_trace.size() >= 2);
  CHECK(res.order.size() == 4);
}

TEST_CASE("visiting order follows removal p-values", "[mfp]") {
  const auto data = mfp_data(92);
  const auto order = removal_order(data, {"x3", "x2", "x1", "x4"});
  CHECK(order.back() == "x3");
}

TEST_CASE("final spec equals the last cycle decisions", "[mfp]") {
  const auto data = mfp_data(93);
  const auto res = mfp(data, {"x1", "x2", "x3", "x4"});
  std::size_t terms = 0;
  for (const auto& d : res.cycle_trace.back().decisions) terms += d.terms.size();
  CHECK(res.final_spec.terms.size() == terms);
  CHECK(res.fit.coefficients.size() == static_cast<Eigen::Index>(res.final_spec.column_count()));
}

TEST_CASE("force-in and degree limits", "[mfp]") {
  const auto data = mfp_data(94);
  MfpConfig config;
  config.force_in = {"x3"};
  config.max_degree["x1"] = 1;
  const auto res = mfp(data, {"x1", "x2", "x3", "x4"}, config);
  CHECK(res.decisions.at("x3").included());
  CHECK(res.decisions.at("x1").function.verdict != Verdict::Fp2);
}

TEST_CASE("categorical candidates enter as blocks", "[mfp]") {
  Rng rng = make_stream(95, 0);
  const std::size_t n = 300;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<double>(1 + i % 3);
  auto y = test::normals(rng, n);
  for (std::size_t i = 0; i < n; ++i) y[i] += g[i] == 2.0 ? 1.0 : 0.0;
  const auto data = test::make_data({g}, y);
  MfpConfig config;
  config.categorical = {"x1"};
  const auto res = mfp(data, {"x1"}, config);
  const auto& d = res.decisions.at("x1");
  CHECK(d.kind == VariableKind::Categorical);
  REQUIRE(d.terms.size() == 1);
  CHECK(d.terms[0].width() == 2);
}

TEST_CASE("spike candidates use the spike procedure", "[mfp]") {
  Rng rng = make_stream(96, 0);
  const std::size_t n = 400;
  std::vector<double> x(n);
  auto y = test::normals(rng, n, 0.0, 0.5);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = uniform01(rng) < 0.25 ? 0.0 : std::exp(standard_normal(rng));
    y[i] += x[i] > 0.0 ? 1.0 + std::log(x[i]) : 0.0;
  }
  MfpConfig config;
  config.spike = {"x1"};
  config.max_degree["x1"] = 1;
  const auto res = mfp(test::make_data({x}, y), {"x1"}, config);
  const auto& d = res.decisions.at("x1");
  CHECK(d.kind == VariableKind::Spike);
  REQUIRE(d.spike);
  CHECK(d.spike->verdict == SpikeVerdict::IndicatorAndFp);
}

TEST_CASE("max degree 0 keeps a continuous variable linear", "[mfp]") {
  const auto data = mfp_data(95);
  MfpConfig config;
  config.max_degree["x1"] = 0;
  const auto res = mfp(data, {"x1", "x2", "x3", "x4"}, config);
  const auto& d1 = res.decisions.at("x1");
  CHECK(d1.function.verdict == Verdict::Linear);
  REQUIRE(d1.terms.size() == 1);
  CHECK(d1.terms[0] == linear_term("x1"));
  CHECK(d1.function.steps.size() == 1);

  config.max_degree["x1"] = 3;
  CHECK_THROWS_AS(mfp(data, {"x1", "x2"}, config), Error);
}
