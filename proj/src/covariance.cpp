#include "carate/covariance.hpp"

#include <algorithm>
#include <cctype>

#include "carate/error.hpp"

namespace carate {

std::string_view variant_name(VarianceVariant v) {
  switch (v) {
    case VarianceVariant::kCrossFit: return "crossfit";
    case VarianceVariant::kHomoskedastic: return "ho";
    case VarianceVariant::kHc3: return "hc3";
    case VarianceVariant::kNaiveFixedK: return "naive";
  }
  return "?";
}

VarianceVariant parse_variant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "crossfit") return VarianceVariant::kCrossFit;
  if (lower == "ho" || lower == "homoskedastic") return VarianceVariant::kHomoskedastic;
  if (lower == "hc3") return VarianceVariant::kHc3;
  if (lower == "naive") return VarianceVariant::kNaiveFixedK;
  throw UsageError("unknown variance variant '" + std::string(name) +
                   "' (expected crossfit, ho, hc3 or naive)");
}

double sigma22(const Dataset& d, const StrataIndex& idx, double tau_unadj) {
  double within = 0.0;
  double between = 0.0;
  for (std::size_t s = 0; s < idx.num_strata(); ++s) {
    const auto& cells = idx.strata[s];
    if (cells.treated.empty() || cells.control.empty()) {
      throw DataError("stratum '" + cells.label + "' has an empty arm");
    }
    const double pi = idx.propensity(s);
    double arm_mean[2] = {0.0, 0.0};
    for (int a : {1, 0}) {
      const auto& rows = cells.arm(a);
      const double scale = a == 1 ? 1.0 / pi : 1.0 / (1.0 - pi);
      double mean = 0.0;
      for (std::size_t i : rows) mean += d.y(static_cast<Eigen::Index>(i));
      mean /= static_cast<double>(rows.size());
      arm_mean[a] = mean;
      const double scaled_mean = scale * mean;
      for (std::size_t i : rows) {
        const double dev = scale * d.y(static_cast<Eigen::Index>(i)) - scaled_mean;
        within += dev * dev;
      }
    }
    const double gap = arm_mean[1] - arm_mean[0] - tau_unadj;
    between += idx.share(s) * gap * gap;
  }
  return within / static_cast<double>(idx.n) + between;
}

double omega_hat(const ArmFit& fit) {
  const double total = (fit.row_sum.array().square() * fit.y.array() *
                        fit.loo_resid.array()).sum();
  return total / (static_cast<double>(fit.size()) * fit.gamma * fit.gamma);
}

double varpi_hat(const ArmFit& fit) {
  const double total =
      (fit.row_sum.array() * fit.y.array() * fit.loo_resid.array()).sum();
  return total / (static_cast<double>(fit.size()) * fit.gamma);
}

double omega_hc3(const ArmFit& fit) {
  const double total =
      (fit.row_sum.array().square() * fit.loo_resid.array().square()).sum();
  return total / (static_cast<double>(fit.size()) * fit.gamma * fit.gamma);
}

double homoskedastic_error_variance(const ArmFit& fit) {
  const double dof =
      static_cast<double>(fit.size()) - 1.0 - static_cast<double>(fit.k());
  return fit.resid.squaredNorm() / dof;
}

double residual_second_moment(const ArmFit& fit) {
  return fit.resid.squaredNorm() / static_cast<double>(fit.size());
}

SigmaUTerms sigma_u_terms(const ArmFits& fits, const StrataIndex& idx,
                          VarianceVariant variant) {
  SigmaUTerms out;
  const double n = static_cast<double>(idx.n);
  for (std::size_t s = 0; s < idx.num_strata(); ++s) {
    const double ns = static_cast<double>(idx.strata[s].size());
    for (int a : {0, 1}) {
      const ArmFit& fit = fits.at(s, a);
      ArmVarianceTerms t;
      t.stratum = s;
      t.arm = a;
      t.weight = ns * ns / (n * static_cast<double>(fit.size()));
      switch (variant) {
        case VarianceVariant::kCrossFit:
          t.u11_term = omega_hat(fit);
          t.u12_term = varpi_hat(fit);
          break;
        case VarianceVariant::kHomoskedastic: {
          const double v = homoskedastic_error_variance(fit);
          t.u11_term = v / fit.gamma;
          t.u12_term = v;
          break;
        }
        case VarianceVariant::kHc3:
          t.u11_term = omega_hc3(fit);
          t.u12_term = varpi_hat(fit);
          break;
        case VarianceVariant::kNaiveFixedK:
          t.u11_term = residual_second_moment(fit);
          t.u12_term = t.u11_term;
          break;
      }
      out.u11 += t.weight * t.u11_term;
      out.u12 += t.weight * t.u12_term;
      out.arms.push_back(t);
    }
  }
  return out;
}

double sigma_v_adj(const ArmFits& fits, const StrataIndex& idx,
                   bool leverage_correction) {
  double total = 0.0;
  for (std::size_t s = 0; s < idx.num_strata(); ++s) {
    const ArmFit& control = fits.at(s, 0);
    const ArmFit& treated = fits.at(s, 1);
    double bracket = 0.0;
    for (const ArmFit* fit : {&treated, &control}) {
      const double na = static_cast<double>(fit->size());
      double term = fit->slope.dot(fit->gram * fit->slope) / na;
      if (leverage_correction) {
        term -= (fit->leverage.array() * fit->y.array() *
                 fit->loo_resid.array()).sum() / na;
      }
      bracket += term;
    }
    // Gram over the whole stratum is the sum of the two arm Grams.
    const Eigen::MatrixXd gram_s = treated.gram + control.gram;
    const double ns = static_cast<double>(idx.strata[s].size());
    bracket -= 2.0 / ns * treated.slope.dot(gram_s * control.slope);
    total += idx.share(s) * bracket;
  }
  return total;
}

double sigma_v_naive(const ArmFits& fits, const StrataIndex& idx) {
  double total = 0.0;
  for (std::size_t s = 0; s < idx.num_strata(); ++s) {
    const ArmFit& control = fits.at(s, 0);
    const ArmFit& treated = fits.at(s, 1);
    const Eigen::VectorXd diff = treated.slope - control.slope;
    const Eigen::MatrixXd gram_s = treated.gram + control.gram;
    const double ns = static_cast<double>(idx.strata[s].size());
    total += idx.share(s) * diff.dot(gram_s * diff) / ns;
  }
  return total;
}

double sigma_w(const ArmFits& fits, const StrataIndex& idx, double tau_adj) {
  double total = 0.0;
  for (std::size_t s = 0; s < idx.num_strata(); ++s) {
    const double gap = fits.at(s, 1).intercept - fits.at(s, 0).intercept - tau_adj;
    total += idx.share(s) * gap * gap;
  }
  return total;
}

SigmaHat sigma_matrix(const Dataset& d, const StrataIndex& idx,
                      const ArmFits& fits, double tau_adj, double tau_unadj,
                      VarianceVariant variant) {
  SigmaHat out;
  out.variant = variant;
  out.u = sigma_u_terms(fits, idx, variant);
  out.v_adj = variant == VarianceVariant::kNaiveFixedK ? sigma_v_naive(fits, idx)
                                                       : sigma_v_adj(fits, idx);
  out.w = sigma_w(fits, idx, tau_adj);
  out.s22 = sigma22(d, idx, tau_unadj);
  const double common = out.v_adj + out.w;
  out.matrix(0, 0) = out.u.u11 + common;
  out.matrix(0, 1) = out.u.u12 + common;
  out.matrix(1, 0) = out.matrix(0, 1);
  out.matrix(1, 1) = out.s22;
  out.contrast = out.matrix(0, 0) + out.matrix(1, 1) - 2.0 * out.matrix(0, 1);
  const double det = out.matrix(0, 0) * out.matrix(1, 1) -
                     out.matrix(0, 1) * out.matrix(0, 1);
  out.psd = out.matrix(0, 0) >= 0.0 && out.matrix(1, 1) >= 0.0 && det >= 0.0;
  return out;
}

}  // namespace carate
