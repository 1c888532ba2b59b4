#include "carate/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "carate/error.hpp"

namespace carate {

UnadjustedEstimate tau_unadj(const Dataset& d, const StrataIndex& idx) {
  UnadjustedEstimate out;
  for (std::size_t s = 0; s < idx.num_strata(); ++s) {
    const auto& cells = idx.strata[s];
    if (cells.treated.empty() || cells.control.empty()) {
      throw DataError("stratum '" + cells.label + "': " +
                      (cells.treated.empty() ? "no treated units" : "no control units"));
    }
    double means[2];
    for (int a : {0, 1}) {
      double sum = 0.0;
      for (std::size_t i : cells.arm(a)) sum += d.y(static_cast<Eigen::Index>(i));
      means[a] = sum / static_cast<double>(cells.arm_size(a));
    }
    out.treated_mean.push_back(means[1]);
    out.control_mean.push_back(means[0]);
    out.tau += idx.share(s) * (means[1] - means[0]);
  }
  return out;
}

AdjustedEstimate tau_adj(const Dataset& d, const StrataIndex& idx) {
  AdjustedEstimate out;
  for (const auto& cells : idx.strata) {
    if (cells.treated.empty() || cells.control.empty()) {
      throw DataError("stratum '" + cells.label + "': " +
                      (cells.treated.empty() ? "no treated units" : "no control units"));
    }
  }
  out.demeaned = demean_by_stratum(d, idx);
  out.fits = fit_all_arms(d, idx, out.demeaned);
  for (std::size_t s = 0; s < idx.num_strata(); ++s) {
    out.tau += idx.share(s) * (out.fits.at(s, 1).intercept - out.fits.at(s, 0).intercept);
  }
  return out;
}

double aipw_value(const Dataset& d, const StrataIndex& idx, const ArmFits& fits) {
  const double n = static_cast<double>(idx.n);
  const bool has_x = d.k() > 0;
  double total = 0.0;
  for (std::size_t i = 0; i < idx.n; ++i) {
    const std::size_t s = idx.stratum_of_row[i];
    const double pi = idx.propensity(s);
    const auto r = static_cast<Eigen::Index>(i);
    double fitted[2] = {0.0, 0.0};
    if (has_x) {
      for (int a : {0, 1}) fitted[a] = d.x.row(r).dot(fits.at(s, a).slope);
    }
    const double yi = d.y(r);
    if (d.a[i] == 1) {
      total += (yi - fitted[1]) / pi;
    } else {
      total -= (yi - fitted[0]) / (1.0 - pi);
    }
    total += fitted[1] - fitted[0];
  }
  return total / n;
}

double combination_variance(const Eigen::Matrix2d& sigma, double weight) {
  const Eigen::Vector2d v(weight, 1.0 - weight);
  return v.dot(sigma * v);
}

Combination combine(double tau_adj, double tau_unadj, const Eigen::Matrix2d& sigma,
                    double ridge) {
  if (!(ridge >= 0.0)) throw UsageError("ridge must be non-negative");
  const double s11 = sigma(0, 0);
  const double s12 = 0.5 * (sigma(0, 1) + sigma(1, 0));
  const double s22 = sigma(1, 1);
  const double denom = s11 - 2.0 * s12 + s22 + ridge;
  const double scale = std::max({std::abs(s11), std::abs(s12), std::abs(s22)});
  if (ridge == 0.0 && std::abs(denom) <= 1e-12 * scale) {
    throw NumericalError("degenerate combination; supply a ridge value");
  }
  if (!std::isfinite(denom) || denom == 0.0) {
    throw NumericalError("degenerate combination; supply a ridge value");
  }
  Combination out;
  out.weight = (s22 - s12) / denom;
  out.tau = out.weight * tau_adj + (1.0 - out.weight) * tau_unadj;
  out.variance = combination_variance(sigma, out.weight);
  return out;
}

Combination combine_checked(double tau_adj, double tau_unadj,
                            const Eigen::Matrix2d& sigma, double ridge) {
  try {
    return combine(tau_adj, tau_unadj, sigma, ridge);
  } catch (const NumericalError&) {
    const double s11 = sigma(0, 0);
    const double s12 = 0.5 * (sigma(0, 1) + sigma(1, 0));
    const double s22 = sigma(1, 1);
    const double scale = std::max({std::abs(s11), std::abs(s12), std::abs(s22)});
    const double tol = 1e-10 * scale;
    const double tau_tol =
        1e-10 * (std::abs(tau_adj) + std::abs(tau_unadj) + std::sqrt(scale));
    const bool coincide = std::abs(s11 - s12) <= tol && std::abs(s22 - s12) <= tol &&
                          std::abs(tau_adj - tau_unadj) <= tau_tol;
    if (!coincide) throw;
    Combination out;
    out.weight = 1.0;
    out.tau = tau_adj;
    out.variance = s11;
    out.coincident = true;
    return out;
  }
}

AteResult estimate_ate(const Dataset& d, const StrataIndex& idx,
                       VarianceVariant variant, double ridge) {
  AteResult out;
  const UnadjustedEstimate unadj = tau_unadj(d, idx);
  AdjustedEstimate adj = tau_adj(d, idx);
  out.tau_unadj = unadj.tau;
  out.tau_adj = adj.tau;
  for (std::size_t s = 0; s < idx.num_strata(); ++s) {
    out.tau_treated.push_back(adj.fits.at(s, 1).intercept);
    out.tau_control.push_back(adj.fits.at(s, 0).intercept);
  }
  out.sigma = sigma_matrix(d, idx, adj.fits, adj.tau, unadj.tau, variant);
  const Combination c = combine_checked(adj.tau, unadj.tau, out.sigma.matrix, ridge);
  out.tau_star = c.tau;
  out.weight = c.weight;
  out.var_star = c.variance;
  out.coincident = c.coincident;
  out.fits = std::move(adj.fits);
  return out;
}

}  // namespace carate
