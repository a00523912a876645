#pragma once

namespace mfpkit {

/// Regularized upper incomplete gamma Q(a, x) for a > 0, x >= 0.
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

/// Upper tail of the chi-square distribution. Throws DomainError for x < 0 or
/// df < 1.
double chi2_sf(double x, int df);

/// Upper tail of the F distribution with (df1, df2) degrees of freedom.
double f_sf(double f, double df1, double df2);

double normal_cdf(double z);

}  // namespace mfpkit
