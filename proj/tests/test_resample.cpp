#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "mfpkit/error.hpp"
#include "mfpkit/resample.hpp"
#include "support.hpp"

using namespace mfpkit;

namespace {

Dataset data_with_noise(std::uint64_t seed, std::size_t n = 150) {
  Rng rng = make_stream(seed, 0);
  std::vector<std::vector<double>> xs;
  for (int j = 0; j < 4; ++j) xs.push_back(test::normals(rng, n));
  auto y = test::normals(rng, n);
  for (std::size_t i = 0; i < n; ++i) y[i] += 0.6 * xs[0][i] + 0.2 * xs[1][i];
  return test::make_data(xs, y);
}

ModelSpec all_linear() {
  return ModelSpec{{linear_term("x1"), linear_term("x2"), linear_term("x3"), linear_term("x4")}};
}

const std::vector<std::string> kVars{"x1", "x2", "x3", "x4"};

}  // namespace

TEST_CASE("resample row draws", "[resample]") {
  ResamplePlan sub{ResamplePlan::Scheme::Subsample, 0.632, 10, 9};
  const auto rows = resample_rows(100, sub, 3);
  CHECK(rows.size() == 63);
  CHECK(std::set<std::size_t>(rows.begin(), rows.end()).size() == 63);
  CHECK(std::is_sorted(rows.begin(), rows.end()));
  CHECK(resample_rows(100, sub, 3) == rows);
  CHECK(resample_rows(100, sub, 4) != rows);

  ResamplePlan boot{ResamplePlan::Scheme::Bootstrap, 0.632, 10, 9};
  const auto b = resample_rows(100, boot, 0);
  CHECK(b.size() == 100);
  CHECK(std::all_of(b.begin(), b.end(), [](std::size_t i) { return i < 100; }));
}

TEST_CASE("stability report is deterministic and worker independent", "[resample]") {
  const auto data = data_with_noise(111);
  const auto selector = be_selector(all_linear(), Criterion::p_value(0.157));
  const ResamplePlan plan{ResamplePlan::Scheme::Bootstrap, 0.632, 40, 2024};
  const auto a = stability(data, kVars, selector, plan, 1);
  const auto b = stability(data, kVars, selector, plan, 3);
  CHECK(a.bif == b.bif);
  CHECK(a.co_inclusion == b.co_inclusion);
  CHECK(a.model_freq == b.model_freq);
  CHECK(a.successes == 40);
  CHECK(a.bif[0] == 1.0);
}

TEST_CASE("co-inclusion respects the Frechet bounds", "[resample]") {
  const auto data = data_with_noise(112);
  const auto selector = be_selector(all_linear(), Criterion::aic());
  const auto r = stability(data, kVars, selector, ResamplePlan{ResamplePlan::Scheme::Subsample, 0.5, 60, 5}, 1);
  const std::size_t b = r.successes;
  for (std::size_t i = 0; i < kVars.size(); ++i) {
    CHECK(r.co_inclusion_counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) == r.inclusion_counts[i]);
    for (std::size_t j = 0; j < kVars.size(); ++j) {
      const auto both = r.co_inclusion_counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      CHECK(both <= std::min(r.inclusion_counts[i], r.inclusion_counts[j]));
      CHECK(both + b >= r.inclusion_counts[i] + r.inclusion_counts[j]);
    }
  }
  double total = 0.0;
  for (const auto& [set, freq] : r.model_freq) total += freq;
  CHECK(total == Catch::Approx(1.0));
}

TEST_CASE("failing replications are counted", "[resample]") {
  const auto data = data_with_noise(113);
  std::size_t calls = 0;
  const Selector flaky = [&calls](const Dataset& d) -> std::vector<std::string> {
    if (d.outcome()[0] > 0.0) throw Error(Errc::RankDeficient, "boom");
    ++calls;
    return {"x1"};
  };
  const auto r = stability(data, kVars, flaky, ResamplePlan{ResamplePlan::Scheme::Bootstrap, 0.632, 30, 1}, 1);
  CHECK(r.failures + r.successes == 30);
  CHECK(r.failure_messages.size() == std::min<std::size_t>(r.failures, 10));

  const Selector broken = [](const Dataset&) -> std::vector<std::string> { throw Error(Errc::RankDeficient, "x"); };
  CHECK_THROWS_AS(stability(data, kVars, broken, ResamplePlan{ResamplePlan::Scheme::Bootstrap, 0.632, 5, 1}, 1),
                  Error);
  CHECK_THROWS_AS(stability(data, kVars, flaky, ResamplePlan{ResamplePlan::Scheme::Bootstrap, 0.632, 0, 1}, 1), Error);
}

TEST_CASE("BIF selection warns about proxy pairs", "[resample]") {
  StabilityReport r;
  r.variables = {"a", "b", "c"};
  r.successes = 10;
  r.inclusion_counts = {5, 6, 1};
  r.bif = {0.5, 0.6, 0.1};
  r.co_inclusion_counts.resize(3, 3);
  r.co_inclusion_counts << 5, 1, 0, 1, 6, 0, 0, 0, 1;
  r.co_inclusion = r.co_inclusion_counts.cast<double>() / 10.0;
  CHECK(r.union_frequency(0, 1) == Catch::Approx(1.0));
  const auto sel = bif_select(r, 0.75);
  CHECK(sel.selected.empty());
  REQUIRE(sel.warnings.size() == 1);
  CHECK(sel.warnings[0].first == "a");
  CHECK(sel.warnings[0].second == "b");
  CHECK(bif_select(r, 0.55).selected == std::vector<std::string>{"b"});
  CHECK_THROWS_AS(bif_select(r, 1.5), Error);
}
