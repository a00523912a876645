#include "mfpkit/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mfpkit/distributions.hpp"
#include "mfpkit/error.hpp"

namespace mfpkit {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Marks columns that are (numerically) linear combinations of earlier ones,
// scanning left to right with twice-applied Gram-Schmidt.
std::vector<bool> find_aliased(const MatrixXd& x, double tolerance) {
  const Index n = x.rows();
  std::vector<bool> aliased(static_cast<std::size_t>(x.cols()), false);
  MatrixXd q(n, x.cols());
  Index rank = 0;
  for (Index j = 0; j < x.cols(); ++j) {
    VectorXd v = x.col(j);
    const double norm0 = v.norm();
    if (!(norm0 > 0.0) || !std::isfinite(norm0)) {
      aliased[static_cast<std::size_t>(j)] = true;
      continue;
    }
    for (int pass = 0; pass < 2 && rank > 0; ++pass) v -= q.leftCols(rank) * (q.leftCols(rank).transpose() * v);
    const double norm1 = v.norm();
    if (norm1 <= tolerance * norm0) {
      aliased[static_cast<std::size_t>(j)] = true;
      continue;
    }
    q.col(rank++) = v / norm1;
  }
  return aliased;
}

// Weighted least squares by column-pivoted QR of sqrt(w) X.
struct WlsSolution {
  VectorXd beta;
  MatrixXd xtwx_inverse;
};

WlsSolution solve_wls(const MatrixXd& x, const VectorXd& sqrt_w, const VectorXd& z) {
  const MatrixXd xw = sqrt_w.asDiagonal() * x;
  const VectorXd zw = sqrt_w.cwiseProduct(z);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(xw);
  WlsSolution out;
  out.beta = qr.solve(zw);
  const Index p = x.cols();
  const MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(p, p));
  const MatrixXd inner = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  out.xtwx_inverse = perm * inner * perm.transpose();
  return out;
}

double softplus(double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }

// Binomial log-likelihood from the linear predictor, stable for large |eta|.
double binomial_loglik(const VectorXd& eta, std::span<const double> y) {
  double ll = 0.0;
  for (Index i = 0; i < eta.size(); ++i) ll += y[i] * eta(i) - softplus(eta(i));
  return ll;
}

double gaussian_loglik(double rss, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double floor_rss = std::max(rss, nn * 1e-300);
  return -0.5 * nn * (std::log(2.0 * std::numbers::pi * floor_rss / nn) + 1.0);
}

double logistic(double v) { return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); }

}  // namespace

double FitResult::standard_error(std::size_t column) const {
  const auto c = static_cast<Index>(column);
  return std::sqrt(std::max(0.0, covariance(c, c)));
}

FitResult fit_design(const MatrixXd& x, std::span<const double> y, Family family, const GlmControl& control) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (y.size() != n) throw Error(Errc::DomainError, "outcome length does not match design rows");
  FitResult result;
  result.family = family;
  result.n = n;
  result.aliased = find_aliased(x, control.alias_tolerance);

  std::vector<Index> kept;
  for (Index j = 0; j < x.cols(); ++j)
    if (!result.aliased[static_cast<std::size_t>(j)]) kept.push_back(j);
  const auto rank = static_cast<Index>(kept.size());
  if (rank < x.cols())
    result.warnings.push_back(std::to_string(x.cols() - rank) + " aliased design column(s) dropped");
  if (static_cast<std::size_t>(rank) >= n)
    throw Error(Errc::RankDeficient, "design has " + std::to_string(rank) +
                                         " estimable columns but only " + std::to_string(n) + " rows");

  MatrixXd xk(x.rows(), rank);
  for (Index k = 0; k < rank; ++k) xk.col(k) = x.col(kept[static_cast<std::size_t>(k)]);
  const Eigen::Map<const VectorXd> yv(y.data(), x.rows());

  VectorXd beta = VectorXd::Zero(rank);
  MatrixXd xtwx_inv = MatrixXd::Zero(rank, rank);

  if (family == Family::Gaussian) {
    if (rank > 0) {
      auto sol = solve_wls(xk, VectorXd::Ones(x.rows()), yv);
      beta = std::move(sol.beta);
      xtwx_inv = std::move(sol.xtwx_inverse);
    }
    const VectorXd resid = yv - xk * beta;
    result.deviance = resid.squaredNorm();
    result.log_likelihood = gaussian_loglik(result.deviance, n);
    result.dispersion = result.deviance / static_cast<double>(n - static_cast<std::size_t>(rank));
    result.converged = true;
    result.iterations = 1;
  } else {
    VectorXd eta(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
      const double mu = (y[static_cast<std::size_t>(i)] + 0.5) / 2.0;
      eta(i) = std::log(mu / (1.0 - mu));
    }
    double dev_old = std::numeric_limits<double>::infinity();
    double ll_prev = -std::numeric_limits<double>::infinity();
    double ll = -std::numeric_limits<double>::infinity();
    bool have_beta = false;
    for (int iter = 1; iter <= control.max_iterations; ++iter) {
      result.iterations = iter;
      VectorXd sqrt_w(x.rows());
      VectorXd z(x.rows());
      for (Index i = 0; i < x.rows(); ++i) {
        const double mu = logistic(eta(i));
        const double w = std::max(mu * (1.0 - mu), 1e-12);
        sqrt_w(i) = std::sqrt(w);
        z(i) = eta(i) + (yv(i) - mu) / w;
      }
      VectorXd beta_new = VectorXd::Zero(rank);
      if (rank > 0) {
        auto sol = solve_wls(xk, sqrt_w, z);
        beta_new = std::move(sol.beta);
      }
      VectorXd eta_new = xk * beta_new;
      double ll_new = binomial_loglik(eta_new, y);
      // Step halving when the deviance goes up.
      for (int halve = 0; have_beta && halve < 20 && !(ll_new >= ll - 1e-12 * std::abs(ll)); ++halve) {
        beta_new = 0.5 * (beta_new + beta);
        eta_new = xk * beta_new;
        ll_new = binomial_loglik(eta_new, y);
      }
      beta = std::move(beta_new);
      eta = std::move(eta_new);
      have_beta = true;
      ll_prev = ll;
      ll = ll_new;
      const double dev = -2.0 * ll;
      if (std::abs(dev - dev_old) / (std::abs(dev) + 0.1) < control.tolerance) {
        result.converged = true;
        break;
      }
      dev_old = dev;
    }
    if (rank > 0) {
      VectorXd sqrt_w(x.rows());
      for (Index i = 0; i < x.rows(); ++i) {
        const double mu = logistic(eta(i));
        sqrt_w(i) = std::sqrt(std::max(mu * (1.0 - mu), 1e-12));
      }
      xtwx_inv = solve_wls(xk, sqrt_w, VectorXd::Zero(x.rows())).xtwx_inverse;
    }
    result.log_likelihood = ll;
    result.deviance = std::max(0.0, -2.0 * ll);
    result.dispersion = 1.0;
    if (!result.converged) result.warnings.push_back("IRLS did not converge");
    const double max_abs = rank > 0 ? beta.cwiseAbs().maxCoeff() : 0.0;
    if (max_abs > control.separation_bound && ll >= ll_prev) {
      result.separation = true;
      result.warnings.push_back("possible separation: fitted probabilities pinned at 0 or 1");
    }
  }

  const Index p = x.cols();
  result.coefficients = VectorXd::Zero(p);
  result.covariance = MatrixXd::Zero(p, p);
  for (Index a = 0; a < rank; ++a) {
    result.coefficients(kept[static_cast<std::size_t>(a)]) = beta(a);
    for (Index b = 0; b < rank; ++b)
      result.covariance(kept[static_cast<std::size_t>(a)], kept[static_cast<std::size_t>(b)]) =
          result.dispersion * xtwx_inv(a, b);
  }
  result.model_df = static_cast<std::size_t>(rank);
  return result;
}

FitResult fit(const Dataset& data, const ModelSpec& spec, const GlmControl& control) {
  const Design design = build_design(data, spec);
  FitResult result = fit_design(design.matrix, data.outcome(), data.family(), control);
  result.column_labels = design.column_labels;
  result.term_columns = design.term_columns;
  return result;
}

Eigen::VectorXd linear_predictor(const Dataset& data, const ModelSpec& spec, const FitResult& fit) {
  const Design design = build_design(data, spec);
  if (design.matrix.cols() != fit.coefficients.size())
    throw Error(Errc::DomainError, "fit does not match model specification");
  return design.matrix * fit.coefficients;
}

double lr_statistic(const FitResult& reduced, const FitResult& full) {
  if (reduced.n != full.n || reduced.family != full.family)
    throw Error(Errc::NotNested, "fits are not on the same data");
  const double stat = 2.0 * (full.log_likelihood - reduced.log_likelihood);
  const double tol = 1e-7 * std::max(1.0, std::abs(full.log_likelihood));
  if (stat < -tol)
    throw Error(Errc::NotNested, "reduced model fits better than full model (LR statistic " +
                                     std::to_string(stat) + ")");
  return std::max(0.0, stat);
}

double deviance_test(const FitResult& reduced, const FitResult& full, int df, TestKind kind) {
  if (df < 1) throw Error(Errc::DomainError, "deviance_test requires df >= 1");
  const double stat = lr_statistic(reduced, full);
  if (kind == TestKind::ChiSquare || full.family != Family::Gaussian) return chi2_sf(stat, df);
  const double resid_df = static_cast<double>(full.n) - static_cast<double>(full.model_df);
  const double diff = std::max(0.0, reduced.deviance - full.deviance);
  if (full.deviance <= 0.0) return diff > 0.0 ? 0.0 : 1.0;
  const double f = (diff / df) / (full.deviance / resid_df);
  return f_sf(f, df, resid_df);
}

}  // namespace mfpkit
