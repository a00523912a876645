#include "mfpkit/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <variant>

#include "mfpkit/fsp.hpp"
#include "mfpkit/spike_zero.hpp"

namespace mfpkit::cli {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Json pre_json(const PreTransform& pre) { return Json{{"shift", number(pre.shift)}, {"scale", number(pre.scale)}}; }

Json powers_json(const std::optional<FpPowers>& p) {
  if (!p) return nullptr;
  Json out = Json::array();
  for (std::size_t i = 0; i < p->degree(); ++i) out.push_back(number((*p)[i]));
  return out;
}

Json labels(const std::vector<Term>& terms) {
  Json out = Json::array();
  for (const auto& t : terms) out.push_back(t.label());
  return out;
}

Json strings(const std::vector<std::string>& v) {
  Json out = Json::array();
  for (const auto& s : v) out.push_back(s);
  return out;
}

}  // namespace

Json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

Json to_json(const Term& term) {
  Json out{{"label", term.label()}, {"variable", term.variable}};
  std::visit(Overloaded{
                 [&](const LinearTransform&) { out["kind"] = "linear"; },
                 [&](const FpTransform& t) {
                   out["kind"] = "fp";
                   out["powers"] = powers_json(t.powers);
                   out["pre"] = pre_json(t.pre);
                 },
                 [&](const SpikeFpTransform& t) {
                   out["kind"] = "spike_fp";
                   out["powers"] = powers_json(t.powers);
                   out["pre"] = pre_json(t.pre);
                 },
                 [&](const IndicatorTransform& t) {
                   out["kind"] = "indicator";
                   out["lower"] = number(t.lower);
                   out["upper"] = number(t.upper);
                 },
                 [&](const CategoricalTransform& t) {
                   out["kind"] = "categorical";
                   Json cuts = Json::array();
                   for (const double c : t.cutpoints) cuts.push_back(number(c));
                   out["cutpoints"] = cuts;
                   if (const auto* s = std::get_if<ScoreCoding>(&t.coding)) {
                     Json scores = Json::array();
                     for (const double v : s->scores) scores.push_back(number(v));
                     out["scores"] = scores;
                   } else {
                     out["reference"] = std::get<DummyCoding>(t.coding).reference;
                   }
                 },
             },
             term.transform);
  return out;
}

Json to_json(const ModelSpec& spec) {
  Json terms = Json::array();
  for (const auto& t : spec.terms) terms.push_back(to_json(t));
  return Json{{"intercept", spec.intercept}, {"terms", terms}};
}

Json to_json(const FitResult& fit) {
  Json coefs = Json::array();
  for (std::size_t j = 0; j < fit.column_labels.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    coefs.push_back(Json{{"label", fit.column_labels[j]},
                         {"estimate", number(fit.coefficients(i))},
                         {"se", fit.aliased[j] ? Json(nullptr) : number(fit.standard_error(j))},
                         {"aliased", static_cast<bool>(fit.aliased[j])}});
  }
  return Json{{"family", std::string(to_string(fit.family))},
              {"n", fit.n},
              {"model_df", fit.model_df},
              {"deviance", number(fit.deviance)},
              {"log_likelihood", number(fit.log_likelihood)},
              {"dispersion", number(fit.dispersion)},
              {"converged", fit.converged},
              {"iterations", fit.iterations},
              {"separation", fit.separation},
              {"coefficients", coefs},
              {"warnings", strings(fit.warnings)}};
}

Json to_json(const StepTest& test) {
  return Json{{"label", test.label},         {"statistic", number(test.statistic)}, {"df", test.df},
              {"p_value", number(test.p_value)}, {"alpha", number(test.alpha)},     {"significant", test.significant()}};
}

Json to_json(const FunctionDecision& d) {
  Json steps = Json::array();
  for (const auto& s : d.steps) steps.push_back(to_json(s));
  return Json{{"variable", d.variable},
              {"verdict", std::string(to_string(d.verdict))},
              {"powers", powers_json(d.powers)},
              {"max_degree", d.options.max_degree},
              {"force_in", d.options.force_in},
              {"distinct_values", d.distinct_values},
              {"linear_only", d.linear_only},
              {"pre", pre_json(d.pre)},
              {"best_fp1", powers_json(d.best_fp1)},
              {"best_fp2", powers_json(d.best_fp2)},
              {"deviance", Json{{"null", number(d.deviance_null)},
                                {"linear", number(d.deviance_linear)},
                                {"fp1", d.best_fp1 ? number(d.deviance_fp1) : Json(nullptr)},
                                {"fp2", d.best_fp2 ? number(d.deviance_fp2) : Json(nullptr)}}},
              {"steps", steps}};
}

Json to_json(const SpikeDecision& d) {
  auto opt = [](const std::optional<StepTest>& t) { return t ? to_json(*t) : Json(nullptr); };
  return Json{{"variable", d.variable},
              {"verdict", std::string(to_string(d.verdict))},
              {"zero_fraction", number(d.zero_fraction)},
              {"pre", pre_json(d.pre)},
              {"joint_test", opt(d.joint_test)},
              {"remove_indicator", opt(d.remove_indicator)},
              {"remove_fp", opt(d.remove_fp)},
              {"fp_function", d.fp_function ? to_json(*d.fp_function) : Json(nullptr)},
              {"terms", labels(d.terms)}};
}

Json to_json(const VariableDecision& d) {
  Json out{{"variable", d.variable},
           {"kind", std::string(to_string(d.kind))},
           {"included", d.included()},
           {"terms", labels(d.terms)}};
  if (d.spike)
    out["spike"] = to_json(*d.spike);
  else
    out["function"] = to_json(d.function);
  return out;
}

Json to_json(const MfpResult& r) {
  Json cycles = Json::array();
  for (const auto& c : r.cycle_trace) {
    Json decisions = Json::array();
    for (const auto& d : c.decisions) decisions.push_back(to_json(d));
    cycles.push_back(Json{{"decisions", decisions}});
  }
  Json final_decisions = Json::array();
  for (const auto& v : r.order) {
    const auto& d = r.decisions.at(v);
    Json entry{{"variable", v}, {"kind", std::string(to_string(d.kind))}};
    if (d.spike)
      entry["verdict"] = std::string(to_string(d.spike->verdict));
    else
      entry["verdict"] = std::string(to_string(d.function.verdict));
    entry["powers"] = d.spike ? Json(nullptr) : powers_json(d.function.powers);
    entry["terms"] = labels(d.terms);
    final_decisions.push_back(entry);
  }
  return Json{{"order", strings(r.order)},
              {"converged", r.converged},
              {"cycles", cycles},
              {"final", final_decisions},
              {"final_spec", to_json(r.final_spec)},
              {"fit", to_json(r.fit)}};
}

Json to_json(const SelectionTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps)
    steps.push_back(Json{{"action", std::string(to_string(s.action))},
                         {"term", s.term},
                         {"p_value", number(s.p_value)},
                         {"df", s.df},
                         {"threshold", number(s.threshold)},
                         {"criterion_delta", number(s.criterion_delta)},
                         {"deviance_after", number(s.deviance_after)},
                         {"change_in_estimate", s.change_in_estimate ? number(*s.change_in_estimate) : Json(nullptr)}});
  return Json{{"start", labels(t.start_spec.terms)},
              {"steps", steps},
              {"final", labels(t.final_spec.terms)},
              {"final_spec", to_json(t.final_spec)},
              {"fit", to_json(t.final_fit)},
              {"warnings", strings(t.warnings)}};
}

Json to_json(const ScreenResult& s) {
  Json tests = Json::array();
  for (const auto& [term, p] : s.p_values) tests.push_back(Json{{"term", term}, {"p_value", number(p)}});
  return Json{{"tests", tests}, {"selected", strings(s.selected)}, {"warning", s.warning}};
}

Json to_json(const StabilityReport& r) {
  Json vars = Json::array();
  for (std::size_t i = 0; i < r.variables.size(); ++i)
    vars.push_back(Json{{"variable", r.variables[i]}, {"bif", number(r.bif[i])}, {"count", r.inclusion_counts[i]}});
  Json co = Json::array();
  for (Eigen::Index i = 0; i < r.co_inclusion.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < r.co_inclusion.cols(); ++j) row.push_back(number(r.co_inclusion(i, j)));
    co.push_back(row);
  }
  Json models = Json::array();
  for (const auto& [set, freq] : r.model_freq) models.push_back(Json{{"variables", strings(set)}, {"frequency", number(freq)}});
  return Json{{"plan", Json{{"scheme", r.plan.scheme == ResamplePlan::Scheme::Bootstrap ? "bootstrap" : "subsample"},
                            {"rate", number(r.plan.rate)},
                            {"replications", r.plan.replications},
                            {"seed", r.plan.master_seed}}},
              {"successes", r.successes},
              {"failures", r.failures},
              {"failure_messages", strings(r.failure_messages)},
              {"variables", vars},
              {"co_inclusion", co},
              {"models", models}};
}

Json to_json(const BifSelection& s) {
  Json warnings = Json::array();
  for (const auto& w : s.warnings)
    warnings.push_back(Json{{"first", w.first}, {"second", w.second}, {"union_frequency", number(w.union_frequency)}});
  return Json{{"threshold", number(s.threshold)}, {"selected", strings(s.selected)}, {"pair_warnings", warnings}};
}

Json to_json(const ShrinkageFactors& f) {
  Json groups = Json::array();
  for (std::size_t g = 0; g < f.factors.size(); ++g)
    groups.push_back(
        Json{{"group", f.group_labels[g]}, {"columns", strings(f.group_columns[g])}, {"factor", number(f.factors[g])}});
  return Json{{"mode", std::string(to_string(f.mode))},
              {"cv", f.cv.to_string()},
              {"folds", f.folds},
              {"calibration_intercept", number(f.calibration_intercept)},
              {"groups", groups}};
}

Json to_json(const Type1Result& r) {
  return Json{{"n", r.n},
              {"replications", r.replications},
              {"alpha", number(r.alpha)},
              {"range", Json{{"lower", number(r.range.lower)}, {"upper", number(r.range.upper)}}},
              {"rejections", r.rejections},
              {"rate", number(r.rate)},
              {"mc_se", number(r.mc_se)},
              {"warning", r.warning}};
}

Json to_json(const simlab::SelectionScore& s) {
  Json vars = Json::array();
  for (const auto& v : s.variables)
    vars.push_back(Json{{"variable", v.variable},
                        {"truly_active", v.truly_active},
                        {"inclusion_rate", number(v.inclusion_rate)},
                        {"inclusion_se", number(v.inclusion_se)},
                        {"correct_rate", number(v.correct_rate)},
                        {"correct_se", number(v.correct_se)},
                        {"shape_distance", number(v.shape_distance)},
                        {"shape_distance_se", number(v.shape_distance_se)},
                        {"coefficient_rmse", v.coefficient_count ? number(v.coefficient_rmse) : Json(nullptr)},
                        {"coefficient_count", v.coefficient_count}});
  return Json{{"procedure", s.procedure},
              {"replications", s.replications},
              {"failures", s.failures},
              {"failure_messages", strings(s.failure_messages)},
              {"exact_rate", number(s.exact_rate)},
              {"exact_se", number(s.exact_se)},
              {"variables", vars}};
}

std::string dump(const Json& report) { return report.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Text rendering

namespace {

std::string g(const Json& v, int digits = 6) {
  if (v.is_null()) return "-";
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v.get<double>());
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string rpad(const std::string& s, std::size_t width) {
  return s.size() < width ? std::string(width - s.size(), ' ') + s : s;
}

std::string join(const Json& arr, const char* sep = ", ") {
  std::string out;
  for (const auto& v : arr) out += (out.empty() ? "" : sep) + g(v);
  return out.empty() ? "(none)" : out;
}

std::string powers(const Json& p) { return p.is_null() ? "" : "(" + join(p) + ")"; }

std::string marginal(const Json& m) {
  const auto kind = m["kind"].get<std::string>();
  if (kind == "exponential") return kind + "(" + g(m["a"]) + ")";
  return kind + "(" + g(m["a"]) + ", " + g(m["b"]) + ")";
}

std::string form(const Json& f) {
  const auto kind = f["kind"].get<std::string>();
  if (kind == "null") return "no effect";
  if (kind == "power") return kind + "(" + g(f["coefficient"]) + ", " + g(f["power"]) + ")";
  if (kind == "step") return kind + "(" + g(f["coefficient"]) + ", " + g(f["threshold"]) + ")";
  return kind + "(" + g(f["coefficient"]) + ")";
}

class Writer {
 public:
  std::ostringstream os;

  void heading(const std::string& title) { os << "\n" << title << "\n" << std::string(title.size(), '-') << "\n"; }

  void fit(const Json& f) {
    os << "  family " << g(f["family"]) << ", n " << g(f["n"]) << ", estimated parameters " << g(f["model_df"])
       << "\n";
    os << "  deviance " << g(f["deviance"]) << ", log-likelihood " << g(f["log_likelihood"]) << ", dispersion "
       << g(f["dispersion"]) << "\n";
    os << "  converged " << g(f["converged"]) << " after " << g(f["iterations"]) << " iterations";
    if (f["separation"].get<bool>()) os << ", separation detected";
    os << "\n\n";
    std::size_t w = 12;
    for (const auto& c : f["coefficients"]) w = std::max(w, c["label"].get<std::string>().size() + 2);
    os << "  " << pad("term", w) << rpad("estimate", 14) << rpad("std.err", 14) << "\n";
    for (const auto& c : f["coefficients"]) {
      os << "  " << pad(g(c["label"]), w) << rpad(g(c["estimate"]), 14) << rpad(g(c["se"]), 14);
      if (c["aliased"].get<bool>()) os << "  aliased";
      os << "\n";
    }
    for (const auto& m : f["warnings"]) os << "  warning: " << g(m) << "\n";
  }

  void step(const Json& s, const std::string& indent) {
    os << indent << pad(g(s["label"]), 16) << " stat " << rpad(g(s["statistic"]), 11) << "  df " << g(s["df"])
       << "  p " << rpad(g(s["p_value"], 4), 10) << "  alpha " << g(s["alpha"])
       << (s["significant"].get<bool>() ? "  significant" : "") << "\n";
  }

  void function(const Json& d, const std::string& indent) {
    os << indent << "verdict " << g(d["verdict"]) << powers(d["powers"]) << "; distinct values "
       << g(d["distinct_values"]) << "; pre-transformation (x + " << g(d["pre"]["shift"]) << ") / "
       << g(d["pre"]["scale"]);
    if (d["linear_only"].get<bool>())
      os << (d["distinct_values"].get<std::size_t>() < kFspMinDistinct ? "; too few distinct values for FP"
                                                                       : "; FP not considered");
    if (d["force_in"].get<bool>()) os << "; forced in";
    os << "\n";
    if (!d["best_fp1"].is_null() || !d["best_fp2"].is_null())
      os << indent << "best FP1 " << (d["best_fp1"].is_null() ? "-" : powers(d["best_fp1"])) << ", best FP2 "
         << (d["best_fp2"].is_null() ? "-" : powers(d["best_fp2"])) << "\n";
    const auto& dev = d["deviance"];
    os << indent << "deviance: null " << g(dev["null"]) << ", linear " << g(dev["linear"]) << ", FP1 "
       << g(dev["fp1"]) << ", FP2 " << g(dev["fp2"]) << "\n";
    for (const auto& s : d["steps"]) step(s, indent + "  ");
  }

  void spike(const Json& d, const std::string& indent) {
    os << indent << "spike at zero: verdict " << g(d["verdict"]) << "; zero fraction " << g(d["zero_fraction"])
       << "; pre-transformation (x + " << g(d["pre"]["shift"]) << ") / " << g(d["pre"]["scale"]) << "\n";
    for (const char* key : {"joint_test", "remove_indicator", "remove_fp"})
      if (!d[key].is_null()) step(d[key], indent + "  ");
    if (!d["fp_function"].is_null()) {
      os << indent << "positive part:\n";
      function(d["fp_function"], indent + "  ");
    }
  }

  void trace(const Json& t) {
    os << "  start: " << join(t["start"]) << "\n";
    if (t["steps"].empty()) os << "  no steps\n";
    for (const auto& s : t["steps"]) {
      os << "  " << pad(g(s["action"]), 19) << pad(g(s["term"]), 16) << " p " << rpad(g(s["p_value"], 4), 10)
         << "  df " << g(s["df"]) << "  threshold " << g(s["threshold"], 4);
      if (!s["criterion_delta"].is_null()) os << "  criterion change " << g(s["criterion_delta"]);
      if (!s["change_in_estimate"].is_null()) os << "  change in estimate " << g(s["change_in_estimate"]);
      os << "  deviance " << g(s["deviance_after"]) << "\n";
    }
    os << "  final: " << join(t["final"]) << "\n";
    for (const auto& w : t["warnings"]) os << "  warning: " << g(w) << "\n";
    heading("Final model");
    fit(t["fit"]);
  }

  void mfp(const Json& r) {
    heading("Visiting order");
    os << "  " << join(r["order"]) << "\n";
    std::size_t c = 0;
    for (const auto& cycle : r["cycles"]) {
      heading("Cycle " + std::to_string(++c));
      for (const auto& d : cycle["decisions"]) {
        os << "  " << g(d["variable"]) << " [" << g(d["kind"]) << "] -> " << join(d["terms"]) << "\n";
        if (d.contains("spike"))
          spike(d["spike"], "    ");
        else
          function(d["function"], "    ");
      }
    }
    os << "\n" << (r["converged"].get<bool>() ? "Converged" : "Not converged") << " after " << c << " cycle"
       << (c == 1 ? "" : "s") << ".\n";
    heading("Selected functions");
    for (const auto& d : r["final"])
      os << "  " << pad(g(d["variable"]), 14) << pad(g(d["kind"]), 15) << pad(g(d["verdict"]) + powers(d["powers"]), 18)
         << join(d["terms"]) << "\n";
    heading("Final model");
    fit(r["fit"]);
  }

  void stability(const Json& r, const Json& bif) {
    const auto& rep = r;
    os << "  " << g(rep["plan"]["scheme"]) << ", rate " << g(rep["plan"]["rate"]) << ", replications "
       << g(rep["plan"]["replications"]) << ", seed " << g(rep["plan"]["seed"]) << "\n";
    os << "  successful " << g(rep["successes"]) << ", failed " << g(rep["failures"]) << "\n";
    for (const auto& m : rep["failure_messages"]) os << "  failure: " << g(m) << "\n";
    heading("Bootstrap inclusion fractions");
    std::size_t w = 10;
    for (const auto& v : rep["variables"]) w = std::max(w, v["variable"].get<std::string>().size() + 2);
    for (const auto& v : rep["variables"])
      os << "  " << pad(g(v["variable"]), w) << rpad(g(v["bif"], 4), 8) << rpad(g(v["count"]), 8) << "\n";
    heading("Pairwise co-inclusion");
    os << "  " << pad("", w);
    for (const auto& v : rep["variables"]) os << rpad(g(v["variable"]), std::max<std::size_t>(8, w));
    os << "\n";
    for (std::size_t i = 0; i < rep["co_inclusion"].size(); ++i) {
      os << "  " << pad(g(rep["variables"][i]["variable"]), w);
      for (const auto& x : rep["co_inclusion"][i]) os << rpad(g(x, 4), std::max<std::size_t>(8, w));
      os << "\n";
    }
    heading("Model frequencies");
    for (const auto& m : rep["models"]) os << "  " << rpad(g(m["frequency"], 4), 8) << "  " << join(m["variables"], " ") << "\n";
    heading("Selection by inclusion fraction");
    os << "  threshold " << g(bif["threshold"]) << ": " << join(bif["selected"]) << "\n";
    for (const auto& p : bif["pair_warnings"])
      os << "  warning: " << g(p["first"]) << " and " << g(p["second"]) << " are each below the threshold but one of "
         << "them is selected in " << g(p["union_frequency"], 4) << " of replications\n";
  }
};

}  // namespace

std::string render_text(const Json& report) {
  Writer w;
  const auto command = report["command"].get<std::string>();
  w.os << "mfpkit " << command << "\n";
  if (report.contains("data")) {
    const auto& d = report["data"];
    w.os << "data " << g(d["source"]) << ": " << g(d["rows_read"]) << " rows read, " << g(d["dropped_incomplete"])
         << " dropped as incomplete, " << g(d["n"]) << " used\n";
    w.os << "outcome " << g(d["outcome"]) << " (" << g(d["family"]) << "); variables " << join(d["variables"])
         << "\n";
  }
  for (const auto& m : report["warnings"]) w.os << "warning: " << g(m) << "\n";
  const auto& r = report["result"];

  if (command == "fit") {
    w.heading("Model");
    w.fit(r["fit"]);
  } else if (command == "mfp") {
    const auto& s = report["settings"];
    w.os << "alpha_select " << g(s["alpha_select"]) << ", alpha_fp " << g(s["alpha_fp"]) << ", max degree "
         << g(s["max_degree"]) << ", max cycles " << g(s["max_cycles"]) << "\n";
    w.mfp(r);
  } else if (command == "select") {
    w.heading("Selection: " + g(r["method"]) + ", " + g(r["criterion"]));
    if (r.contains("screen")) {
      for (const auto& t : r["screen"]["tests"])
        w.os << "  " << pad(g(t["term"]), 16) << " p " << g(t["p_value"], 4) << "\n";
      w.os << "  selected: " << join(r["screen"]["selected"]) << "\n";
      w.os << "  warning: " << g(r["screen"]["warning"]) << "\n";
      w.heading("Final model");
      w.fit(r["fit"]);
    } else {
      w.trace(r["trace"]);
    }
  } else if (command == "stability") {
    w.heading("Stability of " + g(r["selector"]));
    w.stability(r["report"], r["bif_selection"]);
  } else if (command == "shrink") {
    if (!r["selection"].is_null()) {
      w.heading("Selection");
      w.trace(r["selection"]);
    } else {
      w.heading("Model");
      w.fit(r["fit"]);
    }
    const auto& f = r["shrinkage"];
    w.heading("Shrinkage factors (" + g(f["mode"]) + ", " + g(f["cv"]) + ", " + g(f["folds"]) + " folds)");
    for (const auto& grp : f["groups"])
      w.os << "  " << pad(g(grp["group"]), 18) << rpad(g(grp["factor"]), 12) << "  " << join(grp["columns"]) << "\n";
    w.os << "  calibration intercept " << g(f["calibration_intercept"]) << "\n";
    w.heading("Shrunken coefficients");
    w.os << "  " << pad("term", 18) << rpad("estimate", 14) << rpad("shrunken", 14) << "\n";
    for (const auto& c : r["shrunken"]["coefficients"])
      w.os << "  " << pad(g(c["label"]), 18) << rpad(g(c["estimate"]), 14) << rpad(g(c["shrunken"]), 14) << "\n";
    w.os << "  deviance " << g(r["shrunken"]["deviance"]) << ", log-likelihood " << g(r["shrunken"]["log_likelihood"])
         << "\n";
  } else if (command == "cutpoint-demo") {
    const auto& t = r["type1"];
    w.heading("Minimum p-value cutpoint under the null");
    w.os << "  n " << g(t["n"]) << ", replications " << g(t["replications"]) << ", search range ["
         << g(t["range"]["lower"]) << ", " << g(t["range"]["upper"]) << "], nominal alpha " << g(t["alpha"]) << "\n";
    w.os << "  rejections " << g(t["rejections"]) << ", empirical type I error " << g(t["rate"], 4)
         << " (Monte Carlo SE " << g(t["mc_se"], 3) << ")\n";
    w.os << "  warning: " << g(t["warning"]) << "\n";
  } else if (command == "simulate") {
    const auto& s = r["scenario"];
    w.heading("Scenario");
    w.os << "  n " << g(s["n"]) << ", family " << g(s["family"]) << ", intercept " << g(s["intercept"])
         << ", sigma " << g(s["sigma"]) << ", seed " << g(s["seed"]) << "\n";
    for (const auto& c : s["covariates"])
      w.os << "  " << pad(g(c["name"]), 10) << marginal(c["marginal"]) << ", " << form(c["form"])
           << (c["spike_probability"].get<double>() > 0 ? ", spike " + g(c["spike_probability"]) : "") << "\n";
    w.os << "  first dataset written to " << g(r["data_file"]) << "\n";
    for (const auto& p : r["procedures"]) {
      w.heading("Procedure " + g(p["procedure"]));
      w.os << "  replications " << g(p["replications"]) << ", failures " << g(p["failures"])
           << ", exact true model " << g(p["exact_rate"], 4) << " (SE " << g(p["exact_se"], 3) << ")\n";
      for (const auto& m : p["failure_messages"]) w.os << "  failure: " << g(m) << "\n";
      w.os << "  " << pad("variable", 10) << pad("active", 8) << rpad("included", 10) << rpad("(SE)", 9)
           << rpad("correct", 10) << rpad("shape", 12) << rpad("(SE)", 11) << rpad("coef RMSE", 12) << "\n";
      for (const auto& v : p["variables"])
        w.os << "  " << pad(g(v["variable"]), 10) << pad(g(v["truly_active"]), 8) << rpad(g(v["inclusion_rate"], 4), 10)
             << rpad(g(v["inclusion_se"], 3), 9) << rpad(g(v["correct_rate"], 4), 10)
             << rpad(g(v["shape_distance"], 4), 12) << rpad(g(v["shape_distance_se"], 3), 11)
             << rpad(g(v["coefficient_rmse"], 4), 12) << "\n";
    }
  }
  return w.os.str();
}

}  // namespace mfpkit::cli
