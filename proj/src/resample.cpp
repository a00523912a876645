#include "mfpkit/resample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <string>

#include "mfpkit/error.hpp"
#include "mfpkit/parallel.hpp"
#include "mfpkit/rng.hpp"

namespace mfpkit {

std::string ResamplePlan::to_string() const {
  if (scheme == Scheme::Bootstrap) return "bootstrap with replacement";
  char buf[64];
  std::snprintf(buf, sizeof buf, "subsample (rate %g)", rate);
  return buf;
}

std::vector<std::size_t> resample_rows(std::size_t n, const ResamplePlan& plan, std::size_t replication) {
  Rng rng = make_stream(plan.master_seed, replication);
  std::vector<std::size_t> rows;
  if (plan.scheme == ResamplePlan::Scheme::Bootstrap) {
    rows.resize(n);
    for (auto& r : rows) r = uniform_index(rng, n);
    return rows;
  }
  const auto m = static_cast<std::size_t>(std::llround(plan.rate * static_cast<double>(n)));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = 0; i < m; ++i) std::swap(perm[i], perm[i + uniform_index(rng, n - i)]);
  rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(rows.begin(), rows.end());
  return rows;
}

Selector be_selector(ModelSpec start, Criterion criterion, SelectionOptions options) {
  return [start = std::move(start), criterion, options = std::move(options)](const Dataset& d) {
    return backward_eliminate(d, start, criterion, options).final_spec.variables();
  };
}

Selector mfp_selector(std::vector<std::string> candidates, MfpConfig config) {
  return [candidates = std::move(candidates), config = std::move(config)](const Dataset& d) {
    return mfp(d, candidates, config).final_spec.variables();
  };
}

double StabilityReport::union_frequency(std::size_t i, std::size_t j) const {
  if (successes == 0) return 0.0;
  const auto u = inclusion_counts[i] + inclusion_counts[j] -
                 co_inclusion_counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return static_cast<double>(u) / static_cast<double>(successes);
}

StabilityReport stability(const Dataset& data, const std::vector<std::string>& variables, const Selector& selector,
                          const ResamplePlan& plan, unsigned workers) {
  if (plan.replications < 1) throw Error(Errc::DomainError, "resampling needs at least one replication");
  if (plan.scheme == ResamplePlan::Scheme::Subsample && !(plan.rate > 0.0 && plan.rate < 1.0))
    throw Error(Errc::DomainError, "subsample rate must lie in (0, 1)");
  const std::size_t p = variables.size();

  std::vector<std::optional<std::vector<bool>>> included(plan.replications);
  std::vector<std::string> errors(plan.replications);
  parallel_for(plan.replications, workers, [&](std::size_t r) {
    try {
      const auto rows = resample_rows(data.n(), plan, r);
      const auto chosen = selector(data.select_rows(rows));
      std::vector<bool> flags(p, false);
      for (std::size_t j = 0; j < p; ++j)
        flags[j] = std::find(chosen.begin(), chosen.end(), variables[j]) != chosen.end();
      included[r] = std::move(flags);
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  });

  StabilityReport report;
  report.variables = variables;
  report.plan = plan;
  report.inclusion_counts.assign(p, 0);
  report.co_inclusion_counts.setZero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  std::map<std::vector<bool>, std::size_t> models;
  for (std::size_t r = 0; r < plan.replications; ++r) {
    if (!included[r]) {
      ++report.failures;
      if (report.failure_messages.size() < 10)
        report.failure_messages.push_back("replication " + std::to_string(r) + ": " + errors[r]);
      continue;
    }
    const auto& flags = *included[r];
    ++report.successes;
    ++models[flags];
    for (std::size_t i = 0; i < p; ++i) {
      if (!flags[i]) continue;
      ++report.inclusion_counts[i];
      for (std::size_t j = 0; j < p; ++j)
        if (flags[j]) ++report.co_inclusion_counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  if (report.successes == 0)
    throw Error(Errc::ReplicationFailure, "all " + std::to_string(plan.replications) + " replications failed" +
                                              (report.failure_messages.empty() ? "" : ": " + report.failure_messages[0]));

  const double s = static_cast<double>(report.successes);
  report.bif.resize(p);
  report.co_inclusion.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i) {
    report.bif[i] = static_cast<double>(report.inclusion_counts[i]) / s;
    for (std::size_t j = 0; j < p; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      report.co_inclusion(ii, jj) = static_cast<double>(report.co_inclusion_counts(ii, jj)) / s;
    }
  }
  for (const auto& [flags, count] : models) {
    std::vector<std::string> set;
    for (std::size_t j = 0; j < p; ++j)
      if (flags[j]) set.push_back(variables[j]);
    report.model_freq.emplace_back(std::move(set), static_cast<double>(count) / s);
  }
  std::stable_sort(report.model_freq.begin(), report.model_freq.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return report;
}

BifSelection bif_select(const StabilityReport& report, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(Errc::DomainError, "BIF threshold must lie in [0, 1]");
  BifSelection out;
  out.threshold = threshold;
  const std::size_t p = report.variables.size();
  std::vector<bool> kept(p);
  for (std::size_t i = 0; i < p; ++i) {
    kept[i] = report.bif[i] >= threshold;
    if (kept[i]) out.selected.push_back(report.variables[i]);
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      if (kept[i] || kept[j]) continue;
      const double u = report.union_frequency(i, j);
      if (u >= threshold && threshold > 0.0) out.warnings.push_back({report.variables[i], report.variables[j], u});
    }
  return out;
}

}  // namespace mfpkit
