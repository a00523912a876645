#include "mfpkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "mfpkit/error.hpp"

namespace mfpkit {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double power_value(double x, double p) { return p == 0.0 ? std::log(x) : std::pow(x, p); }

void fill_fp_row(double x, const FpPowers& powers, double* out) {
  out[0] = power_value(x, powers[0]);
  if (powers.degree() == 2) {
    out[1] = powers.repeated() ? out[0] * std::log(x) : power_value(x, powers[1]);
  }
}

}  // namespace

bool in_fp_power_set(double p) {
  return std::find(kFpPowerSet.begin(), kFpPowerSet.end(), p) != kFpPowerSet.end();
}

FpPowers::FpPowers(double p) : p_{p, p}, degree_(1) {
  if (!in_fp_power_set(p)) throw Error(Errc::DomainError, "power " + format_number(p) + " not in FP set");
}

FpPowers::FpPowers(double p1, double p2) : p_{std::min(p1, p2), std::max(p1, p2)}, degree_(2) {
  if (!in_fp_power_set(p1) || !in_fp_power_set(p2))
    throw Error(Errc::DomainError, "powers (" + format_number(p1) + ", " + format_number(p2) +
                                       ") not in FP set");
}

std::string FpPowers::to_string() const {
  if (degree_ == 1) return "(" + format_number(p_[0]) + ")";
  return "(" + format_number(p_[0]) + ", " + format_number(p_[1]) + ")";
}

std::size_t group_of(std::span<const double> cutpoints, double x) {
  // Number of cutpoints strictly below x: x <= cut[g] puts x in group g.
  return static_cast<std::size_t>(std::lower_bound(cutpoints.begin(), cutpoints.end(), x) -
                                  cutpoints.begin());
}

std::size_t Term::width() const {
  return std::visit(Overloaded{
                        [](const LinearTransform&) -> std::size_t { return 1; },
                        [](const FpTransform& t) -> std::size_t { return t.powers.degree(); },
                        [](const SpikeFpTransform& t) -> std::size_t { return t.powers.degree(); },
                        [](const IndicatorTransform&) -> std::size_t { return 1; },
                        [](const CategoricalTransform& t) -> std::size_t {
                          return std::holds_alternative<ScoreCoding>(t.coding) ? 1 : t.group_count() - 1;
                        },
                    },
                    transform);
}

std::string Term::label() const {
  return std::visit(
      Overloaded{
          [&](const LinearTransform&) { return variable; },
          [&](const FpTransform& t) { return "fp(" + variable + ")" + t.powers.to_string(); },
          [&](const SpikeFpTransform& t) { return "spike_fp(" + variable + ")" + t.powers.to_string(); },
          [&](const IndicatorTransform& t) {
            if (std::isinf(t.upper)) return "1[" + variable + ">" + format_number(t.lower) + "]";
            return "1[" + format_number(t.lower) + "<" + variable + "<=" + format_number(t.upper) + "]";
          },
          [&](const CategoricalTransform& t) {
            return std::string(std::holds_alternative<ScoreCoding>(t.coding) ? "score(" : "cat(") +
                   variable + ")";
          },
      },
      transform);
}

Term linear_term(std::string variable) { return Term{std::move(variable), LinearTransform{}}; }

Term fp_term(std::string variable, FpPowers powers, PreTransform pre) {
  return Term{std::move(variable), FpTransform{powers, pre}};
}

ModelSpec ModelSpec::with(Term term) const {
  ModelSpec out = *this;
  out.terms.push_back(std::move(term));
  return out;
}

ModelSpec ModelSpec::without(std::size_t index) const {
  ModelSpec out = *this;
  out.terms.erase(out.terms.begin() + static_cast<std::ptrdiff_t>(index));
  return out;
}

std::optional<std::size_t> ModelSpec::find_variable(std::string_view variable) const {
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i].variable == variable) return i;
  return std::nullopt;
}

std::optional<std::size_t> ModelSpec::find_label(std::string_view label) const {
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (terms[i].label() == label) return i;
  return std::nullopt;
}

std::vector<std::string> ModelSpec::variables() const {
  std::vector<std::string> out;
  for (const auto& t : terms)
    if (std::find(out.begin(), out.end(), t.variable) == out.end()) out.push_back(t.variable);
  return out;
}

std::size_t ModelSpec::column_count() const {
  std::size_t p = intercept ? 1 : 0;
  for (const auto& t : terms) p += t.width();
  return p;
}

Eigen::MatrixXd term_basis(const Term& term, std::span<const double> x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(term.width()));
  std::visit(
      Overloaded{
          [&](const LinearTransform&) {
            for (Eigen::Index i = 0; i < n; ++i) out(i, 0) = x[i];
          },
          [&](const FpTransform& t) {
            double row[2];
            for (Eigen::Index i = 0; i < n; ++i) {
              const double z = t.pre.apply(x[i]);
              if (!(z > 0.0))
                throw Error(Errc::DomainError, "FP term on '" + term.variable +
                                                   "' needs positive values after pre-transformation");
              fill_fp_row(z, t.powers, row);
              for (Eigen::Index k = 0; k < out.cols(); ++k) out(i, k) = row[k];
            }
          },
          [&](const SpikeFpTransform& t) {
            double origin[2];
            double row[2];
            const double z0 = t.pre.apply(0.0);
            if (!(z0 > 0.0))
              throw Error(Errc::DomainError, "spike FP term on '" + term.variable +
                                                 "' maps zero to a nonpositive value");
            fill_fp_row(z0, t.powers, origin);
            for (Eigen::Index i = 0; i < n; ++i) {
              if (x[i] < 0.0)
                throw Error(Errc::DomainError, "spike variable '" + term.variable + "' has negative values");
              if (x[i] == 0.0) {
                for (Eigen::Index k = 0; k < out.cols(); ++k) out(i, k) = 0.0;
                continue;
              }
              fill_fp_row(t.pre.apply(x[i]), t.powers, row);
              for (Eigen::Index k = 0; k < out.cols(); ++k) out(i, k) = row[k] - origin[k];
            }
          },
          [&](const IndicatorTransform& t) {
            for (Eigen::Index i = 0; i < n; ++i) out(i, 0) = (x[i] > t.lower && x[i] <= t.upper) ? 1.0 : 0.0;
          },
          [&](const CategoricalTransform& t) {
            for (std::size_t k = 1; k < t.cutpoints.size(); ++k)
              if (!(t.cutpoints[k] > t.cutpoints[k - 1]))
                throw Error(Errc::DomainError, "cutpoints of '" + term.variable + "' must be strictly increasing");
            if (const auto* scores = std::get_if<ScoreCoding>(&t.coding)) {
              if (scores->scores.size() != t.group_count())
                throw Error(Errc::DomainError, "score count must equal group count for '" + term.variable + "'");
              for (Eigen::Index i = 0; i < n; ++i) out(i, 0) = scores->scores[group_of(t.cutpoints, x[i])];
              return;
            }
            const auto ref = std::get<DummyCoding>(t.coding).reference;
            if (ref >= t.group_count())
              throw Error(Errc::DomainError, "reference group out of range for '" + term.variable + "'");
            out.setZero();
            for (Eigen::Index i = 0; i < n; ++i) {
              const auto g = group_of(t.cutpoints, x[i]);
              if (g == ref) continue;
              out(i, static_cast<Eigen::Index>(g < ref ? g : g - 1)) = 1.0;
            }
          },
      },
      term.transform);
  return out;
}

Design build_design(const Dataset& data, const ModelSpec& spec) {
  for (std::size_t i = 0; i < spec.terms.size(); ++i) {
    if (!data.has_column(spec.terms[i].variable))
      throw Error(Errc::DomainError, "term refers to unknown variable '" + spec.terms[i].variable + "'");
    if (spec.terms[i].variable == data.outcome_name())
      throw Error(Errc::DomainError, "outcome '" + data.outcome_name() + "' used as a covariate");
    for (std::size_t j = 0; j < i; ++j)
      if (spec.terms[i] == spec.terms[j])
        throw Error(Errc::DomainError, "duplicate term " + spec.terms[i].label());
  }
  Design design;
  const auto n = static_cast<Eigen::Index>(data.n());
  design.matrix.resize(n, static_cast<Eigen::Index>(spec.column_count()));
  Eigen::Index col = 0;
  if (spec.intercept) {
    design.matrix.col(col++).setOnes();
    design.column_labels.emplace_back("(intercept)");
  }
  for (const auto& term : spec.terms) {
    const auto block = term_basis(term, data.column(term.variable));
    design.matrix.middleCols(col, block.cols()) = block;
    design.term_columns.emplace_back(static_cast<std::size_t>(col), static_cast<std::size_t>(block.cols()));
    const auto label = term.label();
    if (block.cols() == 1) {
      design.column_labels.push_back(label);
    } else {
      for (Eigen::Index k = 0; k < block.cols(); ++k)
        design.column_labels.push_back(label + "[" + std::to_string(k + 1) + "]");
    }
    col += block.cols();
  }
  return design;
}

}  // namespace mfpkit
