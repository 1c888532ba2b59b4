#ifndef CARATE_DGP_HPP_
#define CARATE_DGP_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carate/data.hpp"
#include "carate/randomize.hpp"
#include "carate/rng.hpp"

namespace carate {

// Simulation designs 1-6:
//   1  linear, one uniform plus many Bernoulli(0.2) dummies
//   2  linear, many independent uniforms
//   3  linear, uniforms correlated through a Toeplitz square root
//   4  nonlinear in six uniforms, regressors from a degree-4 polynomial basis
//   5  as 3, control mean cubic in the covariates
//   6  as 3, control mean quadratic in the covariates
struct ModelSpec {
  int model = 1;
  std::size_t n = 400;
  std::size_t num_strata = 2;
  std::size_t k = 0;
  double effect = 0.0;  // mu_1 - mu_0
  double rho = 0.6;
  // Resolved on first use when empty.
  std::optional<double> c_eps;

  void check() const;
};

// Latent dimension: floor(n / (5 |S|)) for all models but 4, which has 6.
std::size_t latent_dimension(const ModelSpec& spec);
// Regressors available: the latent dimension, or 209 polynomial terms for 4.
std::size_t available_regressors(const ModelSpec& spec);

// S_i = sum_j 1{z1 <= 2j/|S| - 1}, so labels run over 1..|S|.
std::vector<std::string> strata_from_z1(const Eigen::VectorXd& z1,
                                        std::size_t num_strata);

// Symmetric PSD square root of [rho^|i-j|], by eigendecomposition. Cached.
Eigen::MatrixXd toeplitz_sqrt(double rho, std::size_t d);

// Exponent index lists of the degree <= 4 basis on six variables, in
// regressor order. Within each degree: pure powers first, then interactions
// as non-decreasing index tuples in lexicographic order.
const std::vector<std::vector<int>>& polynomial_basis();

// Mean of the bracketed variance factor over `draws` fresh latent draws.
double variance_factor_mean(int model, std::size_t d, double rho,
                            RngStream& rng, std::size_t draws);

inline constexpr std::size_t kCalibrationDraws = 1000000;
inline constexpr std::uint64_t kCalibrationSeed = 0x5EEDCA1B2A7E0001ULL;

// c_eps making E sigma_a(Z)^2 = 1, by Monte Carlo with a fixed sub-seed.
// Cached per (model, latent dimension, rho), so model 4 does not depend on n.
double normalizing_constant(int model, std::size_t n, std::size_t num_strata,
                            double rho = 0.6);

Eigen::MatrixXd build_regressors(int model, const Eigen::MatrixXd& z,
                                 std::size_t k);

struct GeneratedTrial {
  Dataset data;
  Eigen::MatrixXd z;
  Eigen::VectorXd y1;
  Eigen::VectorXd y0;
  double tau_true = 0.0;
  double c_eps = 1.0;
};

// Streams for one replication: covariates, noise and assignment are drawn
// from separate purposes so that a change of scheme leaves the others intact.
GeneratedTrial generate(const ModelSpec& spec, const Scheme& scheme,
                        std::uint64_t seed, std::uint64_t replication);

}  // namespace carate

#endif  // CARATE_DGP_HPP_
