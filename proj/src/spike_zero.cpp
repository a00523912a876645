#include "mfpkit/spike_zero.hpp"

#include <string>

#include "mfpkit/error.hpp"
#include "mfpkit/fp.hpp"

namespace mfpkit {

std::string_view to_string(SpikeVerdict verdict) {
  switch (verdict) {
    case SpikeVerdict::None: return "none";
    case SpikeVerdict::IndicatorOnly: return "indicator only";
    case SpikeVerdict::FpOnly: return "FP only";
    case SpikeVerdict::IndicatorAndFp: return "indicator + FP";
  }
  return "?";
}

SpikeDecomposition spike_decompose(std::span<const double> x) {
  SpikeDecomposition out;
  std::size_t zeros = 0;
  std::vector<double> positives;
  out.indicator.reserve(x.size());
  out.positive_part.reserve(x.size());
  for (const double v : x) {
    if (v < 0.0) throw Error(Errc::DomainError, "spike-at-zero variable has negative values");
    const bool exposed = v > 0.0;
    zeros += exposed ? 0 : 1;
    out.indicator.push_back(exposed ? 1.0 : 0.0);
    out.positive_part.push_back(exposed ? v : 0.0);
    if (exposed) positives.push_back(v);
  }
  if (zeros == 0) throw Error(Errc::NoSpike, "variable has no zeros; use an ordinary FP");
  if (positives.empty()) throw Error(Errc::AllZero, "variable is zero everywhere");
  out.zero_fraction = static_cast<double>(zeros) / static_cast<double>(x.size());
  out.positive_distinct = distinct_count(positives);
  out.pre = pretransform(x);
  return out;
}

std::vector<double> spike_merge(const SpikeDecomposition& parts) {
  std::vector<double> out(parts.indicator.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = parts.indicator[i] > 0.0 ? parts.positive_part[i] : 0.0;
  return out;
}

Term spike_indicator_term(const std::string& variable) { return Term{variable, IndicatorTransform{0.0}}; }

Term spike_fp_term(const std::string& variable, const FpPowers& powers, const PreTransform& pre) {
  return Term{variable, SpikeFpTransform{powers, pre}};
}

SpikeDecision spike_fsp(const Dataset& data, std::string_view variable, const FspOptions& options,
                        const ModelSpec& adjustment) {
  if (adjustment.find_variable(variable))
    throw Error(Errc::DomainError, "adjustment model already contains '" + std::string(variable) + "'");
  fsp_degrees_of_freedom(options.max_degree);  // rejects unsupported degrees
  const std::string name(variable);
  const auto parts = spike_decompose(data.column(variable));

  SpikeDecision d;
  d.variable = name;
  d.zero_fraction = parts.zero_fraction;
  d.pre = parts.pre;

  const Term z = spike_indicator_term(name);
  const FitResult null_fit = fit(data, adjustment);
  const ModelSpec with_z = adjustment.with(z);
  const FitResult z_fit = fit(data, with_z);

  auto step = [&](std::string label, const FitResult& reduced, const FitResult& full, int df) {
    StepTest s;
    s.label = std::move(label);
    s.statistic = lr_statistic(reduced, full);
    s.df = df;
    s.p_value = deviance_test(reduced, full, df, options.test);
    s.alpha = options.alpha_exclusion;
    return s;
  };

  if (parts.positive_distinct < kFspMinDistinct) {
    d.joint_test = step("Z vs null", null_fit, z_fit, 1);
    if (options.force_in || d.joint_test->significant()) {
      d.verdict = SpikeVerdict::IndicatorOnly;
      d.terms.push_back(z);
    }
    return d;
  }

  const auto pre = parts.pre;
  const FpTermFactory make_fp = [name, pre](const FpPowers& p) { return spike_fp_term(name, p, pre); };
  const int fp_df = 2 * options.max_degree;

  const auto best_with_z = best_fp_with(data, options.max_degree, with_z, make_fp, pre);
  const auto best_alone = best_fp_with(data, options.max_degree, adjustment, make_fp, pre);

  d.joint_test = step("Z + FP vs null", null_fit, best_with_z.fit, 1 + fp_df);
  if (!options.force_in && !d.joint_test->significant()) return d;

  d.remove_indicator = step("Z + FP vs FP", best_alone.fit, best_with_z.fit, 1);
  d.remove_fp = step("Z + FP vs Z", z_fit, best_with_z.fit, fp_df);
  bool keep_z = d.remove_indicator->significant();
  bool keep_fp = d.remove_fp->significant();
  if (!keep_z && !keep_fp) {
    if (d.remove_indicator->p_value < d.remove_fp->p_value)
      keep_z = true;
    else
      keep_fp = true;
  }

  if (keep_z) d.terms.push_back(z);
  if (keep_fp) {
    FspFamily family;
    family.variable = name;
    family.pre = pre;
    family.distinct_values = parts.positive_distinct;
    family.linear = spike_fp_term(name, FpPowers(1.0), pre);
    family.make_fp = make_fp;
    FspOptions form = options;
    form.force_in = true;
    const ModelSpec form_adjustment = keep_z ? with_z : adjustment;
    d.fp_function = fsp_select_with(data, family, form, form_adjustment);
    const auto& f = *d.fp_function;
    d.terms.push_back(spike_fp_term(name, f.powers ? *f.powers : FpPowers(1.0), pre));
  }
  d.verdict = keep_z && keep_fp ? SpikeVerdict::IndicatorAndFp
              : keep_z          ? SpikeVerdict::IndicatorOnly
                                : SpikeVerdict::FpOnly;
  return d;
}

SpikeDecision spike_fsp(const Dataset& data, std::string_view variable, double alpha, int max_degree,
                        const ModelSpec& adjustment) {
  return spike_fsp(data, variable, FspOptions::uniform(alpha, max_degree), adjustment);
}

}  // namespace mfpkit
