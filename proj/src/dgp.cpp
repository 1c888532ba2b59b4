#include "carate/dgp.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "carate/error.hpp"
#include "carate/stats.hpp"

namespace carate {

namespace {

constexpr std::size_t kPolynomialVariables = 6;
constexpr int kPolynomialDegree = 4;

bool correlated(int model) { return model == 3 || model == 5 || model == 6; }

// Threshold for the Bernoulli(0.2) dummies of model 1.
double dummy_threshold() {
  static const double t = normal_inverse_cdf(0.8);
  return t;
}

void append_tuples(int degree, int first, std::vector<int>& prefix,
                   std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == degree) {
    bool all_equal = true;
    for (int v : prefix) all_equal = all_equal && v == prefix.front();
    if (!all_equal) out.push_back(prefix);
    return;
  }
  for (int j = first; j < static_cast<int>(kPolynomialVariables); ++j) {
    prefix.push_back(j);
    append_tuples(degree, j, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

void ModelSpec::check() const {
  if (model < 1 || model > 6) throw UsageError("model must be in 1..6");
  if (n < 1) throw UsageError("n must be positive");
  if (num_strata < 1) throw UsageError("number of strata must be positive");
  if (!(std::abs(rho) < 1.0)) throw UsageError("rho must satisfy |rho| < 1");
  if (model != 4 && latent_dimension(*this) < 2) {
    throw UsageError("n / (5 |S|) must be at least 2 for this model");
  }
  if (k > available_regressors(*this)) {
    throw UsageError("k = " + std::to_string(k) + " exceeds the " +
                     std::to_string(available_regressors(*this)) +
                     " available regressors");
  }
}

std::size_t latent_dimension(const ModelSpec& spec) {
  if (spec.model == 4) return kPolynomialVariables;
  return spec.n / (5 * spec.num_strata);
}

std::size_t available_regressors(const ModelSpec& spec) {
  if (spec.model == 4) return polynomial_basis().size();
  return latent_dimension(spec);
}

std::vector<std::string> strata_from_z1(const Eigen::VectorXd& z1,
                                        std::size_t num_strata) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(z1.size()));
  const double count = static_cast<double>(num_strata);
  for (Eigen::Index i = 0; i < z1.size(); ++i) {
    int label = 0;
    for (std::size_t j = 1; j <= num_strata; ++j) {
      const double g = 2.0 * static_cast<double>(j) / count - 1.0;
      if (z1(i) <= g) ++label;
    }
    out.push_back(std::to_string(label));
  }
  return out;
}

Eigen::MatrixXd toeplitz_sqrt(double rho, std::size_t d) {
  static std::mutex mu;
  static std::map<std::pair<double, std::size_t>, Eigen::MatrixXd> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find({rho, d}); it != cache.end()) return it->second;

  const auto m = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd sigma(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      sigma(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of the Toeplitz matrix failed");
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd raw = eig.eigenvectors() * root.asDiagonal() *
                              eig.eigenvectors().transpose();
  const Eigen::MatrixXd q = 0.5 * (raw + raw.transpose());
  cache.emplace(std::make_pair(rho, d), q);
  return q;
}

const std::vector<std::vector<int>>& polynomial_basis() {
  static const std::vector<std::vector<int>> basis = [] {
    std::vector<std::vector<int>> out;
    for (int degree = 1; degree <= kPolynomialDegree; ++degree) {
      for (int j = 0; j < static_cast<int>(kPolynomialVariables); ++j) {
        out.emplace_back(static_cast<std::size_t>(degree), j);
      }
      if (degree > 1) {
        std::vector<int> prefix;
        append_tuples(degree, 0, prefix, out);
      }
    }
    return out;
  }();
  return basis;
}

double variance_factor_mean(int model, std::size_t d, double rho, RngStream& rng,
                            std::size_t draws) {
  if (draws == 0) throw UsageError("calibration needs at least one draw");
  const std::size_t others = d - 1;
  const double root = std::sqrt(static_cast<double>(others));
  Eigen::VectorXd q_ones;
  if (correlated(model)) {
    q_ones = toeplitz_sqrt(rho, others) * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(others));
  }
  const double threshold = dummy_threshold();
  double total = 0.0;
  for (std::size_t r = 0; r < draws; ++r) {
    const double z1 = rng.uniform(-1.0, 1.0);
    double w = 0.0;
    for (std::size_t j = 0; j < others; ++j) {
      if (model == 1) {
        w += rng.standard_normal() >= threshold ? 1.0 : 0.0;
      } else if (correlated(model)) {
        w += q_ones(static_cast<Eigen::Index>(j)) * rng.uniform(-1.0, 1.0);
      } else {
        w += rng.uniform(-1.0, 1.0);
      }
    }
    const double s = z1 + w / root;
    total += 1.0 + s * s;
  }
  return total / static_cast<double>(draws);
}

double normalizing_constant(int model, std::size_t n, std::size_t num_strata,
                            double rho) {
  ModelSpec spec;
  spec.model = model;
  spec.n = n;
  spec.num_strata = num_strata;
  spec.rho = rho;
  spec.check();
  const std::size_t d = latent_dimension(spec);
  // The constant depends on the design only through (model, d, rho).
  const double rho_key = correlated(model) ? rho : 0.0;

  static std::mutex mu;
  static std::map<std::tuple<int, std::size_t, double>, double> cache;
  const auto key = std::make_tuple(model, d, rho_key);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  RngStream rng(kCalibrationSeed,
                static_cast<std::uint64_t>(model) * 1000003ULL + d,
                Purpose::kCalibration);
  const double mean = variance_factor_mean(model, d, rho, rng, kCalibrationDraws);
  const double c = 1.0 / std::sqrt(mean);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, c);
  return c;
}

Eigen::MatrixXd build_regressors(int model, const Eigen::MatrixXd& z, std::size_t k) {
  const auto kk = static_cast<Eigen::Index>(k);
  if (model != 4) {
    if (kk > z.cols()) throw UsageError("k exceeds the latent dimension");
    return z.leftCols(kk);
  }
  const auto& basis = polynomial_basis();
  if (k > basis.size()) throw UsageError("k exceeds the polynomial basis size");
  Eigen::MatrixXd x(z.rows(), kk);
  for (Eigen::Index c = 0; c < kk; ++c) {
    Eigen::VectorXd col = Eigen::VectorXd::Ones(z.rows());
    for (int j : basis[static_cast<std::size_t>(c)]) col.array() *= z.col(j).array();
    x.col(c) = col;
  }
  return x;
}

GeneratedTrial generate(const ModelSpec& spec, const Scheme& scheme,
                        std::uint64_t seed, std::uint64_t replication) {
  spec.check();
  GeneratedTrial out;
  out.c_eps = spec.c_eps ? *spec.c_eps
                         : normalizing_constant(spec.model, spec.n, spec.num_strata, spec.rho);
  const std::size_t d = latent_dimension(spec);
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto dd = static_cast<Eigen::Index>(d);
  const Eigen::Index others = dd - 1;

  RngStream cov_rng(seed, replication, Purpose::kCovariates);
  RngStream noise_rng(seed, replication, Purpose::kNoise);
  RngStream assign_rng(seed, replication, Purpose::kAssignment);

  out.z.resize(n, dd);
  Eigen::MatrixXd q;
  if (correlated(spec.model)) q = toeplitz_sqrt(spec.rho, static_cast<std::size_t>(others));
  const double threshold = dummy_threshold();
  Eigen::VectorXd v(others);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.z(i, 0) = cov_rng.uniform(-1.0, 1.0);
    if (spec.model == 1) {
      for (Eigen::Index j = 0; j < others; ++j) {
        out.z(i, j + 1) = cov_rng.standard_normal() >= threshold ? 1.0 : 0.0;
      }
    } else {
      for (Eigen::Index j = 0; j < others; ++j) v(j) = cov_rng.uniform(-1.0, 1.0);
      if (correlated(spec.model)) {
        out.z.row(i).tail(others) = (q * v).transpose();
      } else {
        out.z.row(i).tail(others) = v.transpose();
      }
    }
  }

  out.y1.resize(n);
  out.y0.resize(n);
  const double root = std::sqrt(static_cast<double>(others));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto zi = out.z.row(i);
    const double rest = zi.tail(others).sum();
    double m1 = 0.0;
    double m0 = 0.0;
    double s = 0.0;
    switch (spec.model) {
      case 1:
        m1 = zi(0) + 2.0 * rest / root;
        m0 = m1;
        s = zi(0) + rest / root;
        break;
      case 2:
      case 3:
        m1 = 2.0 * rest / root;
        m0 = m1;
        s = zi(0) + rest / root;
        break;
      case 4:
        m1 = 2.0 * std::exp(std::sqrt(zi.squaredNorm() / 6.0));
        m0 = m1;
        s = zi(0) + rest / root;
        break;
      case 5:
        m1 = 2.0 * rest / root;
        m0 = 2.0 * zi.tail(others).array().cube().sum() / root;
        s = zi(0) + rest / root;
        break;
      case 6: {
        m1 = 2.0 * rest / root;
        const auto t = zi.tail(others).array();
        m0 = 2.0 * ((t.square() - 1.0 / 3.0) / 3.0 + t / 10.0).sum() / root;
        s = zi(0) + rest / root;
        break;
      }
      default:
        break;
    }
    const double sigma = out.c_eps * std::sqrt(1.0 + s * s);
    const double e1 = noise_rng.standard_normal();
    const double e0 = noise_rng.standard_normal();
    out.y1(i) = spec.effect + m1 + sigma * e1;
    out.y0(i) = m0 + sigma * e0;
  }

  Dataset& data = out.data;
  data.strata = strata_from_z1(out.z.col(0), spec.num_strata);
  data.a = assign(data.strata, scheme, assign_rng).a;
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.y(i) = data.a[static_cast<std::size_t>(i)] == 1 ? out.y1(i) : out.y0(i);
  }
  data.x = build_regressors(spec.model, out.z, spec.k);
  for (std::size_t c = 0; c < spec.k; ++c) data.covariate_names.push_back("X" + std::to_string(c + 1));
  out.tau_true = spec.effect;
  return out;
}

}  // namespace carate
