#include "carate/rmt.hpp"

#include <cmath>
#include <numbers>

#include "carate/error.hpp"

namespace carate {

namespace {

constexpr int kInitialNodes = 16;
constexpr int kMaxNodes = 8192;

void check_kappa(double kappa) {
  if (!(kappa >= 0.0 && kappa < 1.0)) {
    throw UsageError("kappa must lie in [0, 1)");
  }
}

}  // namespace

void gauss_legendre(int count, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(count), 0.0);
  weights.assign(static_cast<std::size_t>(count), 0.0);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= count; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= count; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = count * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(count - 1 - i);
    nodes[lo] = -x;
    nodes[hi] = x;
    weights[lo] = w;
    weights[hi] = w;
  }
}

MpResult mp_quadrature(double kappa, double tol) {
  check_kappa(kappa);
  if (!(tol > 0.0)) throw UsageError("quadrature tolerance must be positive");
  MpResult out;
  out.kappa = kappa;
  const double root = std::sqrt(kappa);
  out.lambda_minus = (1.0 - root) * (1.0 - root);
  out.lambda_plus = (1.0 + root) * (1.0 + root);
  if (kappa == 0.0) return out;

  const double c = 0.5 * (out.lambda_plus + out.lambda_minus);
  const double r = 0.5 * (out.lambda_plus - out.lambda_minus);
  const double half_pi = std::numbers::pi / 2.0;
  auto integrate = [&](int count) {
    std::vector<double> nodes;
    std::vector<double> weights;
    gauss_legendre(count, nodes, weights);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double u = half_pi * nodes[i];
      const double lambda = c + r * std::sin(u);
      const double cu = std::cos(u);
      sum += weights[i] * (r * r * cu * cu) / (lambda * lambda);
    }
    return sum * half_pi / (2.0 * std::numbers::pi);
  };

  int count = kInitialNodes;
  double previous = integrate(count);
  while (true) {
    count *= 2;
    const double current = integrate(count);
    out.error_estimate = std::abs(current - previous);
    out.zeta = current;
    out.nodes = count;
    if (out.error_estimate < tol) break;
    if (count >= kMaxNodes) {
      throw NumericalError("Marcenko-Pastur quadrature did not converge");
    }
    previous = current;
  }
  out.vif = out.zeta / 2.0;
  return out;
}

double mp_zeta(double kappa, double tol) { return mp_quadrature(kappa, tol).zeta; }

double mp_zeta_closed_form(double kappa) {
  check_kappa(kappa);
  return kappa / (1.0 - kappa);
}

double vif(double kappa) { return mp_zeta(kappa) / 2.0; }

double gamma_inf(double kappa, double pi, int arm) {
  if (!(pi > 0.0 && pi < 1.0)) throw UsageError("pi must lie in (0, 1)");
  if (arm != 0 && arm != 1) throw UsageError("arm must be 0 or 1");
  const double share = arm == 1 ? 1.0 - pi : pi;
  return 1.0 / (1.0 + share * mp_zeta(kappa));
}

std::vector<VifPoint> vif_curve(const std::vector<double>& kappa_grid) {
  std::vector<VifPoint> out;
  out.reserve(kappa_grid.size());
  for (double kappa : kappa_grid) out.push_back({kappa, vif(kappa)});
  return out;
}

std::vector<double> linear_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw UsageError("grid step must be positive");
  std::vector<double> out;
  if (stop < start) return out;
  const auto count =
      static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

}  // namespace carate
