#include "mfpkit/cli/app.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mfpkit/categorize.hpp"
#include "mfpkit/cli/config.hpp"
#include "mfpkit/cli/csv.hpp"
#include "mfpkit/cli/report.hpp"
#include "mfpkit/mfp.hpp"
#include "mfpkit/resample.hpp"
#include "mfpkit/selection.hpp"
#include "mfpkit/shrinkage.hpp"
#include "mfpkit/simlab.hpp"
#include "mfpkit/spike_zero.hpp"

namespace mfpkit::cli {
namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<std::string> data;
  std::optional<double> alpha_select;
  std::optional<double> alpha_fp;
  std::optional<std::string> criterion;
};

AnalysisConfig effective_config(const Overrides& o) {
  AnalysisConfig c = o.config.empty() ? AnalysisConfig{} : load_config(o.config);
  if (o.seed) c.seed = o.seed;
  if (o.workers) c.workers = *o.workers;
  if (o.out) c.out = *o.out;
  if (o.data) {
    c.data = *o.data;
    c.base_dir.clear();
  }
  if (o.alpha_select) c.alpha_select = *o.alpha_select;
  if (o.alpha_fp) c.alpha_fp = *o.alpha_fp;
  if (o.criterion) {
    if (*o.criterion != "p" && *o.criterion != "aic" && *o.criterion != "bic")
      throw Error(Errc::ConfigError, "--criterion must be p, aic or bic");
    c.criterion = *o.criterion;
  }
  validate(c);
  return c;
}

std::uint64_t require_seed(const AnalysisConfig& c, const std::string& command, const char* why = "is stochastic") {
  if (!c.seed)
    throw Error(Errc::ConfigError, command + " " + why + " and needs a seed (--seed N or 'seed = N' in the config)");
  return *c.seed;
}

Criterion criterion_of(const AnalysisConfig& c) { return parse_criterion(c.criterion, c.alpha_select); }

Json settings_json(const AnalysisConfig& c) {
  Json vars = Json::array();
  for (const auto& v : c.variables)
    vars.push_back(Json{{"name", v.name},
                        {"max_degree", v.max_degree ? Json(*v.max_degree) : Json(nullptr)},
                        {"force", v.force},
                        {"categorical", v.categorical},
                        {"spike", v.spike}});
  return Json{{"outcome", c.outcome},
              {"family", std::string(to_string(c.family))},
              {"variables", vars},
              {"alpha_select", number(c.alpha_select)},
              {"alpha_fp", number(c.alpha_fp)},
              {"criterion", c.criterion},
              {"test", c.test == TestKind::F ? "f" : "chisq"},
              {"max_degree", c.max_degree},
              {"max_cycles", c.max_cycles},
              {"select_method", c.select_method},
              {"exposure", c.exposure},
              {"cie_threshold", number(c.cie_threshold)},
              {"cie_mode", c.cie_mode == ChangeMode::Relative ? "relative" : "standardized"},
              {"stability_selector", c.stability_selector},
              {"resample", c.resample_scheme == ResamplePlan::Scheme::Bootstrap ? "bootstrap" : "subsample"},
              {"replications", c.replications},
              {"rate", number(c.rate)},
              {"bif_threshold", number(c.bif_threshold)},
              {"shrink_select", c.shrink_select},
              {"shrinkage", std::string(to_string(c.shrinkage))},
              {"cv", c.cv},
              {"cv_folds", c.cv_folds},
              {"seed", c.seed ? Json(*c.seed) : Json(nullptr)}};
}

struct Loaded {
  Dataset data;
  std::vector<std::string> variables;
  Json summary;
  std::vector<std::string> warnings;
};

Loaded load_data(const AnalysisConfig& c) {
  if (c.data.empty()) throw Error(Errc::ConfigError, "no data file given (--data PATH or 'data = PATH')");
  const auto table = read_csv(c.data_path());
  if (!table.find(c.outcome))
    throw Error(Errc::DataError, "outcome column '" + c.outcome + "' not found in " + c.data_path().string());
  std::vector<std::string> names;
  if (c.variables.empty()) {
    for (const auto& h : table.header)
      if (h != c.outcome) names.push_back(h);
  } else {
    for (const auto& v : c.variables) names.push_back(v.name);
  }
  if (names.empty()) throw Error(Errc::DataError, "no candidate variables besides the outcome");
  auto cases = complete_cases(table, names, c.outcome, c.family);
  std::vector<std::string> warnings;
  if (cases.dropped > 0)
    warnings.push_back(std::to_string(cases.dropped) + " of " + std::to_string(table.rows) +
                       " rows dropped for missing values in the used columns");
  Json summary{{"source", c.data},
               {"rows_read", table.rows},
               {"dropped_incomplete", cases.dropped},
               {"n", cases.data.n()},
               {"outcome", c.outcome},
               {"family", std::string(to_string(c.family))},
               {"variables", names}};
  return {std::move(cases.data), std::move(names), std::move(summary), std::move(warnings)};
}

const VariableSpec* attributes(const AnalysisConfig& c, const std::string& name) {
  for (const auto& v : c.variables)
    if (v.name == name) return &v;
  return nullptr;
}

/// Every variable entered once: dummy block, indicator plus linear for spike
/// variables, linear otherwise.
ModelSpec full_spec(const AnalysisConfig& c, const Loaded& in) {
  ModelSpec spec;
  for (const auto& name : in.variables) {
    const auto* a = attributes(c, name);
    if (a && a->categorical) {
      spec.terms.push_back(categorical_levels_term(name, in.data.column(name)));
    } else if (a && a->spike) {
      spec.terms.push_back(spike_indicator_term(name));
      spec.terms.push_back(linear_term(name));
    } else {
      spec.terms.push_back(linear_term(name));
    }
  }
  return spec;
}

SelectionOptions selection_options(const AnalysisConfig& c) {
  SelectionOptions o;
  o.test = c.test;
  for (const auto& v : c.variables)
    if (v.force) o.force_in.push_back(v.name);
  return o;
}

MfpConfig mfp_config(const AnalysisConfig& c) {
  MfpConfig m;
  m.alpha_select = c.alpha_select;
  m.alpha_fp = c.alpha_fp;
  m.default_max_degree = c.max_degree;
  m.max_cycles = c.max_cycles;
  m.test = c.test;
  for (const auto& v : c.variables) {
    if (v.max_degree) m.max_degree[v.name] = *v.max_degree;
    if (v.force) m.force_in.insert(v.name);
    if (v.categorical) m.categorical.insert(v.name);
    if (v.spike) m.spike.insert(v.name);
  }
  return m;
}

Json envelope(const std::string& command, const AnalysisConfig& c) {
  return Json{{"schema_version", kSchemaVersion}, {"tool", "mfpkit"}, {"command", command}, {"settings", settings_json(c)}};
}

void attach_data(Json& report, Loaded& in) {
  report["data"] = in.summary;
  report["warnings"] = in.warnings;
}

Json cmd_fit(const AnalysisConfig& c) {
  auto in = load_data(c);
  const auto spec = full_spec(c, in);
  Json report = envelope("fit", c);
  attach_data(report, in);
  report["result"] = Json{{"spec", to_json(spec)}, {"fit", to_json(fit(in.data, spec))}};
  return report;
}

Json cmd_mfp(const AnalysisConfig& c) {
  auto in = load_data(c);
  Json report = envelope("mfp", c);
  attach_data(report, in);
  report["result"] = to_json(mfp(in.data, in.variables, mfp_config(c)));
  return report;
}

Json cmd_select(const AnalysisConfig& c) {
  auto in = load_data(c);
  const auto spec = full_spec(c, in);
  const auto crit = criterion_of(c);
  const auto opts = selection_options(c);
  Json result{{"method", c.select_method}, {"criterion", crit.to_string()}};
  if (c.select_method == "be") {
    result["trace"] = to_json(backward_eliminate(in.data, spec, crit, opts));
  } else if (c.select_method == "fs") {
    result["trace"] = to_json(forward_select(in.data, spec.terms, crit, opts));
  } else if (c.select_method == "stepwise") {
    result["trace"] = to_json(stepwise(in.data, spec.terms, crit, opts));
  } else if (c.select_method == "abe") {
    if (c.exposure.empty()) throw Error(Errc::ConfigError, "select_method = abe needs 'exposure'");
    if (!spec.find_label(c.exposure))
      throw Error(Errc::ConfigError, "exposure '" + c.exposure + "' is not a model term");
    result["criterion"] = Criterion::p_value(c.alpha_select).to_string();
    result["trace"] = to_json(augmented_backward_eliminate(in.data, spec, c.alpha_select, c.exposure, c.cie_threshold,
                                                           c.cie_mode, opts));
  } else {
    result["criterion"] = Criterion::p_value(c.alpha_select).to_string();
    const auto screen = univariable_screen(in.data, spec.terms, c.alpha_select);
    ModelSpec kept;
    for (const auto& t : spec.terms)
      if (std::find(screen.selected.begin(), screen.selected.end(), t.label()) != screen.selected.end())
        kept.terms.push_back(t);
    result["screen"] = to_json(screen);
    result["fit"] = to_json(fit(in.data, kept));
  }
  Json report = envelope("select", c);
  attach_data(report, in);
  report["result"] = result;
  return report;
}

Json cmd_stability(const AnalysisConfig& c) {
  const auto seed = require_seed(c, "stability");
  auto in = load_data(c);
  Selector selector;
  std::string name;
  if (c.stability_selector == "mfp") {
    selector = mfp_selector(in.variables, mfp_config(c));
    name = "mfp";
  } else {
    const auto crit = criterion_of(c);
    selector = be_selector(full_spec(c, in), crit, selection_options(c));
    name = "be(" + crit.to_string() + ")";
  }
  ResamplePlan plan;
  plan.scheme = c.resample_scheme;
  plan.rate = c.rate;
  plan.replications = c.replications;
  plan.master_seed = seed;
  const auto rep = stability(in.data, in.variables, selector, plan, c.workers);
  Json report = envelope("stability", c);
  attach_data(report, in);
  report["result"] = Json{{"selector", name}, {"report", to_json(rep)}, {"bif_selection", to_json(bif_select(rep, c.bif_threshold))}};
  return report;
}

Json cmd_shrink(const AnalysisConfig& c) {
  auto in = load_data(c);
  const bool kfold = c.cv == "kfold" || (c.cv == "auto" && in.data.n() > 200);
  const std::uint64_t seed = kfold ? require_seed(c, "shrink", "uses k-fold cross-validation") : c.seed.value_or(0);
  const auto cv = kfold ? CvScheme::kfold(c.cv_folds, seed) : CvScheme::leave_one_out();

  const auto start = full_spec(c, in);
  auto spec = start;
  Json selection = nullptr;
  ShrinkageOptions so;
  so.workers = c.workers;
  if (c.shrink_select == "be") {
    const auto crit = criterion_of(c);
    const auto opts = selection_options(c);
    const auto trace = backward_eliminate(in.data, start, crit, opts);
    spec = trace.final_spec;
    selection = to_json(trace);
    so.reselect = [start, crit, opts](const Dataset& d) { return backward_eliminate(d, start, crit, opts).final_spec; };
  }
  if (spec.terms.empty()) throw Error(Errc::DomainError, "no terms left to shrink");
  const auto f = fit(in.data, spec);
  ShrinkageFactors factors;
  switch (c.shrinkage) {
    case ShrinkageMode::Global: factors = global_shrinkage(in.data, spec, cv, so); break;
    case ShrinkageMode::Parameterwise: factors = parameterwise_shrinkage(in.data, spec, cv, so); break;
    case ShrinkageMode::Joint: factors = joint_shrinkage(in.data, spec, groups_by_term(in.data, spec), cv, so); break;
  }
  const auto shrunk = apply_shrinkage(in.data, spec, f, factors);
  Json coefs = Json::array();
  for (std::size_t j = 0; j < f.column_labels.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    coefs.push_back(Json{{"label", f.column_labels[j]},
                         {"estimate", number(f.coefficients(i))},
                         {"shrunken", number(shrunk.coefficients(i))}});
  }
  Json report = envelope("shrink", c);
  attach_data(report, in);
  report["result"] = Json{{"selection", selection},
                          {"spec", to_json(spec)},
                          {"fit", to_json(f)},
                          {"shrinkage", to_json(factors)},
                          {"shrunken", Json{{"coefficients", coefs},
                                            {"deviance", number(shrunk.deviance)},
                                            {"log_likelihood", number(shrunk.log_likelihood)}}}};
  return report;
}

Json cmd_cutpoint(const AnalysisConfig& c) {
  const auto seed = require_seed(c, "cutpoint-demo");
  const auto r = type1_simulation(c.cutpoint_n, c.cutpoint_replications, c.cutpoint_alpha,
                                  SearchRange{c.cutpoint_lower, c.cutpoint_upper}, seed, c.family, c.workers);
  Json report = envelope("cutpoint-demo", c);
  report["warnings"] = Json::array();
  report["result"] = Json{{"type1", to_json(r)}};
  return report;
}

Json scenario_json(const simlab::Scenario& s) {
  Json covs = Json::array();
  for (const auto& cv : s.covariates)
    covs.push_back(Json{{"name", cv.name},
                        {"marginal", Json{{"kind", std::string(to_string(cv.marginal.kind))},
                                          {"a", number(cv.marginal.a)},
                                          {"b", number(cv.marginal.b)}}},
                        {"form", Json{{"kind", std::string(to_string(cv.form.kind))},
                                      {"coefficient", number(cv.form.coefficient)},
                                      {"power", number(cv.form.power)},
                                      {"threshold", number(cv.form.threshold)}}},
                        {"spike_probability", number(cv.spike_probability)},
                        {"zero_effect", number(cv.zero_effect)}});
  Json corr = Json::array();
  for (Eigen::Index i = 0; i < s.correlation.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < s.correlation.cols(); ++j) row.push_back(number(s.correlation(i, j)));
    corr.push_back(row);
  }
  return Json{{"n", s.n},
              {"family", std::string(to_string(s.family))},
              {"intercept", number(s.intercept)},
              {"sigma", number(s.sigma)},
              {"outcome", s.outcome},
              {"seed", s.seed},
              {"covariates", covs},
              {"correlation", corr}};
}

Json cmd_simulate(const AnalysisConfig& c) {
  require_seed(c, "simulate");
  const auto scenario = c.scenario();
  const auto data = generate(scenario);
  std::filesystem::create_directories(c.out);
  write_csv(std::filesystem::path(c.out) / "data.csv", data);

  auto mc = mfp_config(c);
  for (const auto& cov : scenario.covariates)
    if (cov.spike_probability > 0.0) mc.spike.insert(cov.name);
  Json procs = Json::array();
  for (const auto& p : c.procedures) {
    simlab::Procedure proc;
    if (p == "be") {
      proc = simlab::be_procedure(criterion_of(c), selection_options(c));
    } else if (p == "mfp") {
      proc = simlab::mfp_procedure(mc);
    } else if (p == "oracle") {
      proc = simlab::oracle_procedure();
    } else {
      const auto crit = criterion_of(c);
      if (crit.kind == CriterionKind::PValue)
        throw Error(Errc::ConfigError, "procedure best_subset needs criterion = aic or bic");
      proc = simlab::best_subset_procedure(crit);
    }
    if (c.sim_replications > 0) procs.push_back(to_json(simlab::evaluate(proc, scenario, c.sim_replications, c.workers)));
  }
  Json report = envelope("simulate", c);
  report["settings"]["sim_replications"] = c.sim_replications;
  report["settings"]["procedures"] = c.procedures;
  report["warnings"] = Json::array();
  report["result"] = Json{{"scenario", scenario_json(scenario)}, {"data_file", "data.csv"}, {"procedures", procs}};
  return report;
}

void write_reports(const AnalysisConfig& c, const Json& report, const std::string& text) {
  const std::filesystem::path dir(c.out);
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(Errc::ConfigError, "cannot write '" + p.string() + "'");
    f << content;
  };
  write(dir / "report.json", dump(report));
  write(dir / "report.txt", text);
}

}  // namespace

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Config: return kExitConfig;
    case ErrorCategory::Data: return kExitData;
    case ErrorCategory::Numerical: return kExitNumerical;
  }
  return 1;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variable and function selection for regression models", "mfpkit"};
  app.require_subcommand(1);
  Overrides o;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"fit", "fit the model with every variable entered once"},
      {"mfp", "multivariable fractional polynomials"},
      {"select", "variable selection (be, fs, stepwise, abe, screen)"},
      {"stability", "resampling stability of a selection procedure"},
      {"shrink", "cross-validated shrinkage factors"},
      {"cutpoint-demo", "type I error of the minimum p-value cutpoint"},
      {"simulate", "generate data from a scenario and score procedures"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--workers", o.workers, "worker threads (0: all cores)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--data", o.data, "CSV data file");
    sub->add_option("--alpha-select", o.alpha_select, "selection level");
    sub->add_option("--alpha-fp", o.alpha_fp, "nonlinearity level");
    sub->add_option("--criterion", o.criterion, "p, aic or bic");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto config = effective_config(o);
    Json report;
    if (command == "fit") report = cmd_fit(config);
    else if (command == "mfp") report = cmd_mfp(config);
    else if (command == "select") report = cmd_select(config);
    else if (command == "stability") report = cmd_stability(config);
    else if (command == "shrink") report = cmd_shrink(config);
    else if (command == "cutpoint-demo") report = cmd_cutpoint(config);
    else report = cmd_simulate(config);
    const auto text = render_text(report);
    write_reports(config, report, text);
    out << text;
    return 0;
  } catch (const Error& e) {
    err << "mfpkit " << command << ": " << e.what() << "\n";
    return exit_code(category_of(e.code()));
  } catch (const std::filesystem::filesystem_error& e) {
    err << "mfpkit " << command << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "mfpkit " << command << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mfpkit::cli
