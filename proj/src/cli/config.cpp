#include "mfpkit/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mfpkit/error.hpp"

namespace mfpkit::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Line {
  std::string_view source;
  std::size_t number = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::ConfigError, std::string(source) + ":" + std::to_string(number) + ": " + what);
  }
};

double to_double(const Line& line, const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    line.fail("'" + key + "': '" + text + "' is not a number");
  return v;
}

std::uint64_t to_unsigned(const Line& line, const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    line.fail("'" + key + "': '" + text + "' is not a non-negative integer");
  return v;
}

std::string one_of(const Line& line, const std::string& key, const std::string& text,
                   std::initializer_list<std::string_view> allowed) {
  for (const auto a : allowed)
    if (text == a) return text;
  std::string list;
  for (const auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  line.fail("'" + key + "': '" + text + "' is not one of " + list);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

// Whitespace-separated tokens; parentheses group, so "lognormal(0, 0.75)" is
// one token.
std::vector<std::string> tokens(const Line& line, const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (const char c : text) {
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) line.fail("unbalanced ')'");
    if ((c == ' ' || c == '\t') && depth == 0) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (depth != 0) line.fail("unbalanced '('");
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// "name(a, b)" -> name and numeric arguments.
std::pair<std::string, std::vector<double>> call(const Line& line, const std::string& token) {
  const auto open = token.find('(');
  if (open == std::string::npos) return {token, {}};
  if (token.back() != ')') line.fail("malformed '" + token + "'");
  std::vector<double> args;
  for (const auto& a : split_list(token.substr(open + 1, token.size() - open - 2)))
    args.push_back(to_double(line, token.substr(0, open), a));
  return {token.substr(0, open), args};
}

void parse_variable(const Line& line, const std::string& name, const std::string& value, AnalysisConfig& config) {
  for (const auto& v : config.variables)
    if (v.name == name) line.fail("variable '" + name + "' listed twice");
  VariableSpec spec;
  spec.name = name;
  for (const auto& t : tokens(line, value)) {
    if (t == "fp1") spec.max_degree = 1;
    else if (t == "fp2") spec.max_degree = 2;
    else if (t == "linear") spec.max_degree = 0;
    else if (t == "force") spec.force = true;
    else if (t == "categorical") spec.categorical = true;
    else if (t == "spike") spec.spike = true;
    else line.fail("variable '" + name + "': unknown attribute '" + t + "'");
  }
  if (spec.categorical && spec.spike) line.fail("variable '" + name + "' cannot be both categorical and spike");
  config.variables.push_back(std::move(spec));
}

void parse_covariate(const Line& line, const std::string& name, const std::string& value, AnalysisConfig& config) {
  for (const auto& c : config.covariates)
    if (c.name == name) line.fail("covariate '" + name + "' listed twice");
  const auto toks = tokens(line, value);
  if (toks.empty()) line.fail("covariate '" + name + "' needs a marginal");
  simlab::Covariate cov;
  cov.name = name;
  auto need = [&](const std::string& what, const std::vector<double>& args, std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      line.fail("covariate '" + name + "': " + what + " takes " + std::to_string(lo) +
                (lo == hi ? "" : " to " + std::to_string(hi)) + " arguments");
  };
  {
    const auto [kind, args] = call(line, toks[0]);
    try {
      cov.marginal.kind = simlab::parse_marginal(kind);
    } catch (const Error&) {
      line.fail("covariate '" + name + "': unknown marginal '" + kind + "'");
    }
    if (cov.marginal.kind == simlab::Marginal::Kind::Exponential) {
      need(kind, args, 1, 1);
      cov.marginal = simlab::Marginal::exponential(args[0]);
    } else {
      need(kind, args, 2, 2);
      cov.marginal.a = args[0];
      cov.marginal.b = args[1];
    }
  }
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const auto [word, args] = call(line, toks[i]);
    if (word == "spike") {
      need(word, args, 1, 2);
      cov.spike_probability = args[0];
      if (args.size() == 2) cov.zero_effect = args[1];
      continue;
    }
    simlab::TrueForm::Kind kind{};
    try {
      kind = simlab::parse_true_form(word);
    } catch (const Error&) {
      line.fail("covariate '" + name + "': unknown term '" + word + "'");
    }
    switch (kind) {
      case simlab::TrueForm::Kind::Null: need(word, args, 0, 0); cov.form = simlab::TrueForm::null(); break;
      case simlab::TrueForm::Kind::Linear: need(word, args, 1, 1); cov.form = simlab::TrueForm::linear(args[0]); break;
      case simlab::TrueForm::Kind::Log: need(word, args, 1, 1); cov.form = simlab::TrueForm::log(args[0]); break;
      case simlab::TrueForm::Kind::Power:
        need(word, args, 2, 2);
        cov.form = simlab::TrueForm::power_of(args[0], args[1]);
        break;
      case simlab::TrueForm::Kind::Step:
        need(word, args, 2, 2);
        cov.form = simlab::TrueForm::step(args[0], args[1]);
        break;
    }
  }
  config.covariates.push_back(std::move(cov));
}

void parse_correlation(const Line& line, const std::string& key, const std::string& value, AnalysisConfig& config) {
  const auto names = tokens(line, key);
  if (names.size() != 2) line.fail("correlation entries look like 'x1 x2 = 0.3'");
  config.correlations.push_back({{names[0], names[1]}, to_double(line, key, value)});
}

using Setter = std::function<void(const Line&, const std::string&, const std::string&, AnalysisConfig&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto num = [](double AnalysisConfig::*field) {
      return [field](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
        c.*field = to_double(l, k, v);
      };
    };
    auto level = [](double AnalysisConfig::*field, bool closed_above) {
      return [field, closed_above](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
        const double a = to_double(l, k, v);
        if (!(a > 0.0 && (closed_above ? a <= 1.0 : a < 1.0)))
          l.fail("'" + k + "' must lie in (0, 1" + (closed_above ? "]" : ")"));
        c.*field = a;
      };
    };
    auto count = [](std::size_t AnalysisConfig::*field) {
      return [field](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
        c.*field = static_cast<std::size_t>(to_unsigned(l, k, v));
      };
    };
    auto text = [](std::string AnalysisConfig::*field) {
      return [field](const Line&, const std::string&, const std::string& v, AnalysisConfig& c) { c.*field = v; };
    };
    t["data"] = text(&AnalysisConfig::data);
    t["outcome"] = text(&AnalysisConfig::outcome);
    t["family"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.family = one_of(l, k, v, {"gaussian", "binomial"}) == "gaussian" ? Family::Gaussian : Family::Binomial;
    };
    t["alpha_select"] = level(&AnalysisConfig::alpha_select, true);
    t["alpha_fp"] = level(&AnalysisConfig::alpha_fp, true);
    t["criterion"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.criterion = one_of(l, k, v, {"p", "aic", "bic"});
    };
    t["test"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.test = one_of(l, k, v, {"chisq", "f"}) == "f" ? TestKind::F : TestKind::ChiSquare;
    };
    t["max_degree"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.max_degree = static_cast<int>(to_unsigned(l, k, v));
    };
    t["max_cycles"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.max_cycles = static_cast<int>(to_unsigned(l, k, v));
    };
    t["select_method"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.select_method = one_of(l, k, v, {"be", "fs", "stepwise", "abe", "screen"});
    };
    t["exposure"] = text(&AnalysisConfig::exposure);
    t["cie_threshold"] = num(&AnalysisConfig::cie_threshold);
    t["cie_mode"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.cie_mode = one_of(l, k, v, {"standardized", "relative"}) == "relative" ? ChangeMode::Relative
                                                                             : ChangeMode::Standardized;
    };
    t["stability_selector"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.stability_selector = one_of(l, k, v, {"be", "mfp"});
    };
    t["resample"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.resample_scheme = one_of(l, k, v, {"subsample", "bootstrap"}) == "bootstrap"
                              ? ResamplePlan::Scheme::Bootstrap
                              : ResamplePlan::Scheme::Subsample;
    };
    t["replications"] = count(&AnalysisConfig::replications);
    t["rate"] = level(&AnalysisConfig::rate, false);
    t["bif_threshold"] = level(&AnalysisConfig::bif_threshold, false);
    t["shrink_select"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.shrink_select = one_of(l, k, v, {"none", "be"});
    };
    t["shrinkage"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      const auto m = one_of(l, k, v, {"global", "parameterwise", "joint"});
      c.shrinkage = m == "global" ? ShrinkageMode::Global
                    : m == "joint" ? ShrinkageMode::Joint
                                   : ShrinkageMode::Parameterwise;
    };
    t["cv"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.cv = one_of(l, k, v, {"auto", "loo", "kfold"});
    };
    t["cv_folds"] = count(&AnalysisConfig::cv_folds);
    t["cutpoint_n"] = count(&AnalysisConfig::cutpoint_n);
    t["cutpoint_replications"] = count(&AnalysisConfig::cutpoint_replications);
    t["cutpoint_alpha"] = level(&AnalysisConfig::cutpoint_alpha, true);
    t["cutpoint_lower"] = num(&AnalysisConfig::cutpoint_lower);
    t["cutpoint_upper"] = num(&AnalysisConfig::cutpoint_upper);
    t["n"] = count(&AnalysisConfig::n);
    t["intercept"] = num(&AnalysisConfig::intercept);
    t["sigma"] = num(&AnalysisConfig::sigma);
    t["sim_replications"] = count(&AnalysisConfig::sim_replications);
    t["procedures"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.procedures.clear();
      for (const auto& p : split_list(v))
        c.procedures.push_back(one_of(l, k, p, {"be", "mfp", "oracle", "best_subset"}));
    };
    t["seed"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.seed = to_unsigned(l, k, v);
    };
    t["workers"] = [](const Line& l, const std::string& k, const std::string& v, AnalysisConfig& c) {
      c.workers = static_cast<unsigned>(to_unsigned(l, k, v));
    };
    t["out"] = text(&AnalysisConfig::out);
    return t;
  }();
  return table;
}

}  // namespace

std::filesystem::path AnalysisConfig::data_path() const {
  const std::filesystem::path p(data);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

simlab::Scenario AnalysisConfig::scenario() const {
  if (covariates.empty()) throw Error(Errc::ConfigError, "simulation needs a [covariates] section");
  simlab::Scenario s;
  s.n = n;
  s.covariates = covariates;
  s.intercept = intercept;
  s.family = family;
  s.sigma = sigma;
  s.outcome = outcome;
  if (seed) s.seed = *seed;
  if (!correlations.empty()) {
    const auto p = covariates.size();
    auto index = [&](const std::string& name) {
      for (std::size_t j = 0; j < p; ++j)
        if (covariates[j].name == name) return j;
      throw Error(Errc::ConfigError, "correlation names unknown covariate '" + name + "'");
    };
    s.correlation = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (const auto& [pair, r] : correlations) {
      const auto i = static_cast<Eigen::Index>(index(pair.first));
      const auto j = static_cast<Eigen::Index>(index(pair.second));
      if (i == j) throw Error(Errc::ConfigError, "correlation of '" + pair.first + "' with itself");
      s.correlation(i, j) = s.correlation(j, i) = r;
    }
  }
  s.validate();
  return s;
}

AnalysisConfig parse_config(std::string_view text, std::string_view source) {
  AnalysisConfig config;
  enum class Section { Main, Variables, Covariates, Correlation } section = Section::Main;
  std::set<std::string> seen;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string raw(text.substr(pos, end - pos));
    pos = end + 1;
    ++number;
    const Line line{source, number};
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto content = trim(raw);
    if (content.empty()) continue;
    if (content.front() == '[') {
      if (content.back() != ']') line.fail("malformed section header");
      const auto name = trim(std::string_view(content).substr(1, content.size() - 2));
      if (name == "variables") section = Section::Variables;
      else if (name == "covariates") section = Section::Covariates;
      else if (name == "correlation") section = Section::Correlation;
      else line.fail("unknown section '" + name + "'");
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      if (section == Section::Variables) {
        parse_variable(line, content, "", config);
        continue;
      }
      line.fail("expected 'key = value'");
    }
    const auto key = trim(std::string_view(content).substr(0, eq));
    const auto value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) line.fail("missing key");
    switch (section) {
      case Section::Main: {
        const auto it = setters().find(key);
        if (it == setters().end()) line.fail("unknown key '" + key + "'");
        if (!seen.insert(key).second) line.fail("key '" + key + "' set twice");
        it->second(line, key, value, config);
        break;
      }
      case Section::Variables: parse_variable(line, key, value, config); break;
      case Section::Covariates: parse_covariate(line, key, value, config); break;
      case Section::Correlation: parse_correlation(line, key, value, config); break;
    }
  }
  return config;
}

AnalysisConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  auto config = parse_config(buf.str(), path.string());
  config.base_dir = path.parent_path();
  return config;
}

void validate(const AnalysisConfig& c) {
  auto level = [](const char* name, double a) {
    if (!(a > 0.0 && a <= 1.0)) throw Error(Errc::ConfigError, std::string(name) + " must lie in (0, 1]");
  };
  auto fraction = [](const char* name, double a) {
    if (!(a > 0.0 && a < 1.0)) throw Error(Errc::ConfigError, std::string(name) + " must lie in (0, 1)");
  };
  level("alpha_select", c.alpha_select);
  level("alpha_fp", c.alpha_fp);
  level("cutpoint_alpha", c.cutpoint_alpha);
  fraction("rate", c.rate);
  fraction("bif_threshold", c.bif_threshold);
  if (c.max_degree < 1 || c.max_degree > 2) throw Error(Errc::ConfigError, "max_degree must be 1 or 2");
  if (c.max_cycles < 1) throw Error(Errc::ConfigError, "max_cycles must be at least 1");
  if (c.replications < 1) throw Error(Errc::ConfigError, "replications must be at least 1");
  if (c.cv_folds < 2) throw Error(Errc::ConfigError, "cv_folds must be at least 2");
  if (!(c.cie_threshold >= 0.0)) throw Error(Errc::ConfigError, "cie_threshold must be non-negative");
  if (!(0.0 <= c.cutpoint_lower && c.cutpoint_lower <= c.cutpoint_upper && c.cutpoint_upper <= 1.0))
    throw Error(Errc::ConfigError, "cutpoint range needs 0 <= cutpoint_lower <= cutpoint_upper <= 1");
  if (c.outcome.empty()) throw Error(Errc::ConfigError, "outcome must be named");
  for (const auto& v : c.variables)
    if (v.name == c.outcome) throw Error(Errc::ConfigError, "outcome '" + v.name + "' listed as a variable");
}

}  // namespace mfpkit::cli
