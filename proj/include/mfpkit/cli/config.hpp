#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mfpkit/dataset.hpp"
#include "mfpkit/glm.hpp"
#include "mfpkit/resample.hpp"
#include "mfpkit/selection.hpp"
#include "mfpkit/shrinkage.hpp"
#include "mfpkit/simlab.hpp"

namespace mfpkit::cli {

/// Per-variable attributes from the [variables] table.
struct VariableSpec {
  std::string name;
  std::optional<int> max_degree;  // fp1 -> 1, fp2 -> 2, linear -> 0
  bool force = false;
  bool categorical = false;
  bool spike = false;
};

struct AnalysisConfig {
  std::string data;
  std::string outcome = "y";
  Family family = Family::Gaussian;
  std::vector<VariableSpec> variables;  // empty: every non-outcome column

  double alpha_select = 0.05;
  double alpha_fp = 0.05;
  std::string criterion = "p";
  TestKind test = TestKind::ChiSquare;
  int max_degree = 2;
  int max_cycles = 5;

  std::string select_method = "be";
  std::string exposure;
  double cie_threshold = 0.1;
  ChangeMode cie_mode = ChangeMode::Standardized;

  std::string stability_selector = "be";
  ResamplePlan::Scheme resample_scheme = ResamplePlan::Scheme::Subsample;
  std::size_t replications = 100;
  double rate = 0.632;
  double bif_threshold = 0.7;

  std::string shrink_select = "none";
  ShrinkageMode shrinkage = ShrinkageMode::Global;
  std::string cv = "auto";
  std::size_t cv_folds = 10;

  std::size_t cutpoint_n = 100;
  std::size_t cutpoint_replications = 1000;
  double cutpoint_alpha = 0.05;
  double cutpoint_lower = 0.10;
  double cutpoint_upper = 0.90;

  std::size_t n = 100;
  double intercept = 0.0;
  double sigma = 1.0;
  std::size_t sim_replications = 100;
  std::vector<std::string> procedures{"be", "mfp"};
  std::vector<simlab::Covariate> covariates;
  std::vector<std::pair<std::pair<std::string, std::string>, double>> correlations;

  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::string out = ".";

  /// Directory relative paths in the file are resolved against.
  std::filesystem::path base_dir;

  std::filesystem::path data_path() const;
  /// Scenario described by the [covariates] and [correlation] sections.
  simlab::Scenario scenario() const;
};

/// Parses the key = value format with [variables], [covariates] and
/// [correlation] sections. '#' starts a comment. Throws ConfigError with
/// source:line diagnostics.
AnalysisConfig parse_config(std::string_view text, std::string_view source = "<config>");
AnalysisConfig load_config(const std::filesystem::path& path);

/// Range checks that do not depend on the data. Throws ConfigError.
void validate(const AnalysisConfig& config);

}  // namespace mfpkit::cli
