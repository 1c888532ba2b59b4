#ifndef CARATE_RMT_HPP_
#define CARATE_RMT_HPP_

#include <vector>

namespace carate {

// Marcenko-Pastur quantities for aspect ratio kappa in [0, 1).
struct MpResult {
  double kappa = 0.0;
  double lambda_minus = 1.0;
  double lambda_plus = 1.0;
  double zeta = 0.0;
  double vif = 0.0;
  double error_estimate = 0.0;  // change between the last two node counts
  int nodes = 0;
};

// zeta = integral over [l-, l+] of sqrt((l+ - x)(x - l-)) / (2 pi x^2) dx,
// by Gauss-Legendre on x = c + r sin(u) with doubling node counts.
MpResult mp_quadrature(double kappa, double tol = 1e-12);
double mp_zeta(double kappa, double tol = 1e-12);

// kappa / (1 - kappa). Matches the quadrature; kept as a cross-check.
double mp_zeta_closed_form(double kappa);

// zeta / 2.
double vif(double kappa);

// Limit of gamma_{a,s,n} under Gaussian covariates.
double gamma_inf(double kappa, double pi, int arm);

struct VifPoint {
  double kappa = 0.0;
  double vif = 0.0;
};

std::vector<VifPoint> vif_curve(const std::vector<double>& kappa_grid);

// start, start + step, ... up to stop (inclusive within 1e-9 * step).
std::vector<double> linear_grid(double start, double stop, double step);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace carate

#endif  // CARATE_RMT_HPP_
