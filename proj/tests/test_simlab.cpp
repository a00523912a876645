#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "mfpkit/distributions.hpp"
#include "mfpkit/error.hpp"
#include "mfpkit/simlab.hpp"

using namespace mfpkit;
using namespace mfpkit::simlab;
using Catch::Approx;

namespace {

Scenario null_scenario(std::size_t p, std::size_t n = 100) {
  Scenario s;
  s.n = n;
  for (std::size_t j = 0; j < p; ++j) s.covariates.push_back({"x" + std::to_string(j + 1), Marginal::normal(), {}});
  s.seed = 17;
  return s;
}

}  // namespace

TEST_CASE("generation is deterministic", "[simlab]") {
  auto s = null_scenario(3);
  s.covariates[0].form = TrueForm::linear(1.0);
  const auto a = generate(s);
  const auto b = generate(s);
  for (std::size_t j = 0; j < a.column_count(); ++j) {
    const auto ca = a.column(j);
    const auto cb = b.column(j);
    CHECK(std::equal(ca.begin(), ca.end(), cb.begin()));
  }
  s.seed = 18;
  const auto c = generate(s);
  CHECK(c.column(0)[0] != a.column(0)[0]);
}

TEST_CASE("spike fraction", "[simlab]") {
  Scenario s;
  s.n = 20000;
  s.covariates.push_back({"x", Marginal::lognormal(0.0, 1.0), TrueForm::null(), 0.08});
  s.seed = 3;
  const auto d = generate(s);
  const auto x = d.column("x");
  const double zeros = static_cast<double>(std::count(x.begin(), x.end(), 0.0)) / 20000.0;
  CHECK(zeros == Approx(0.08).margin(3.0 * std::sqrt(0.08 * 0.92 / 20000.0)));
}

TEST_CASE("copula correlation", "[simlab]") {
  Scenario s = null_scenario(2, 20000);
  s.correlation = Eigen::Matrix2d{{1.0, 0.7}, {0.7, 1.0}};
  const auto d = generate(s);
  const auto a = d.column("x1");
  const auto b = d.column("x2");
  double sab = 0, sa = 0, sb = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += a[i] * b[i];
    sa += a[i];
    sb += b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
  }
  const double n = static_cast<double>(a.size());
  const double r = (sab - sa * sb / n) / std::sqrt((saa - sa * sa / n) * (sbb - sb * sb / n));
  CHECK(r == Approx(0.7).margin(0.02));
}

TEST_CASE("invalid scenarios", "[simlab]") {
  Scenario s = null_scenario(2);
  s.correlation = Eigen::Matrix2d{{1.0, 1.2}, {1.2, 1.0}};
  try {
    generate(s);
    FAIL();
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidCorrelation);
  }
  Scenario t = null_scenario(3);
  t.correlation = Eigen::Matrix3d{{1.0, 0.9, -0.9}, {0.9, 1.0, 0.9}, {-0.9, 0.9, 1.0}};
  CHECK_THROWS_AS(generate(t), Error);
  Scenario u = null_scenario(1);
  u.covariates[0].form = TrueForm::log(1.0);
  CHECK_THROWS_AS(generate(u), Error);
}

TEST_CASE("null outcome is independent of covariates", "[simlab]") {
  // Univariable p-values over replications should be uniform.
  const Scenario s = null_scenario(1, 80);
  std::vector<double> p;
  for (std::size_t r = 0; r < 1000; ++r) {
    const auto d = generate(s.replication(r));
    const auto full = fit(d, ModelSpec{{linear_term("x1")}});
    const auto null = fit(d, ModelSpec{});
    p.push_back(deviance_test(null, full, 1, TestKind::F));
  }
  std::sort(p.begin(), p.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double lo = static_cast<double>(i) / p.size();
    const double hi = static_cast<double>(i + 1) / p.size();
    ks = std::max({ks, std::abs(p[i] - lo), std::abs(hi - p[i])});
  }
  CHECK(ks < 0.05);
}

TEST_CASE("oracle procedure scores perfectly", "[simlab]") {
  Scenario s;
  s.n = 400;
  s.covariates = {{"a", Marginal::uniform(0.5, 4.0), TrueForm::log(2.0)},
                  {"b", Marginal::normal(), TrueForm::linear(1.0)},
                  {"c", Marginal::normal(), TrueForm::null()}};
  s.sigma = 0.5;
  s.seed = 5;
  const auto score = evaluate(oracle_procedure(), s, 20, 1);
  CHECK(score.replications == 20);
  CHECK(score.failures == 0);
  CHECK(score.exact_rate == 1.0);
  for (const auto& v : score.variables) {
    CHECK(v.correct_rate == 1.0);
    CHECK(v.shape_distance < 0.01);
  }
  CHECK(score.variables[1].coefficient_rmse < 0.1);
  CHECK(score.variables[2].coefficient_count == 20);
  CHECK(score.variables[2].coefficient_rmse == 0.0);
}

TEST_CASE("evaluate is worker independent", "[simlab]") {
  Scenario s = null_scenario(4, 120);
  s.covariates[0].form = TrueForm::linear(0.5);
  const auto proc = be_procedure(Criterion::p_value(0.05));
  const auto a = evaluate(proc, s, 30, 1);
  const auto b = evaluate(proc, s, 30, 3);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(a.variables[j].inclusion_rate == b.variables[j].inclusion_rate);
    CHECK(a.variables[j].shape_distance == b.variables[j].shape_distance);
  }
}

TEST_CASE("best subset matches an independent enumeration", "[simlab]") {
  Scenario s = null_scenario(5, 80);
  s.covariates[0].form = TrueForm::linear(0.4);
  s.covariates[2].form = TrueForm::linear(-0.3);
  const auto names = s.names();
  for (std::size_t r = 0; r < 5; ++r) {
    const auto d = generate(s.replication(r));
    const auto best = oracle::best_subset(d, names, Criterion::aic());
    // Re-enumerate in a different order: by subset size, then Gray code.
    double best_value = INFINITY;
    for (std::size_t k = 0; k < 32; ++k) {
      const std::size_t mask = k ^ (k >> 1);
      ModelSpec spec;
      for (std::size_t j = 0; j < 5; ++j)
        if (mask & (1u << j)) spec.terms.push_back(linear_term(names[j]));
      const auto f = fit(d, spec);
      best_value = std::min(best_value, -2.0 * f.log_likelihood + 2.0 * static_cast<double>(f.model_df));
    }
    CHECK(best.criterion_value == Approx(best_value).epsilon(1e-12));
  }
  CHECK_THROWS_AS(oracle::best_subset(generate(null_scenario(13, 60)), null_scenario(13).names(), Criterion::aic()),
                  Error);
}

TEST_CASE("agreement between best subset and BE", "[simlab]") {
  Scenario s = null_scenario(4, 150);
  s.covariates[0].form = TrueForm::linear(0.5);
  const auto a = agreement_rate(best_subset_procedure(Criterion::aic()), be_procedure(Criterion::aic()), s, 20, 1);
  CHECK(a.replications == 20);
  CHECK(a.rate >= 0.0);
  CHECK(a.rate <= 1.0);
}

TEST_CASE("BE false inclusion on null data", "[simlab]") {
  const Scenario s = null_scenario(4, 100);
  const auto score = evaluate(be_procedure(Criterion::p_value(0.05)), s, 300, 1);
  for (const auto& v : score.variables) CHECK(v.inclusion_rate == Approx(0.05).margin(4.0 * 0.0126));
}
