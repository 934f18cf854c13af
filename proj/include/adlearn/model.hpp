#pragma once

// Data-generating process of the linear regression with decreasing-gain
// adaptive learning, and the learning filters used by the estimators:
//
//   y_t = delta0 + beta0 * a_{t-1} + eps_t
//   a_t = a_{t-1} + (theta0 / t) * (y_t - a_{t-1}),   a_0 = a_init
//   z_t = a_{t-1} + u_t                               (noisy survey of a_{t-1})

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace adlearn {

struct ThetaBounds {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double theta) const { return theta >= lo && theta <= hi; }
};

struct ModelParams {
  double theta0 = 2.0;
  double beta0 = 0.25;
  double delta0 = 1.0;
  double sigma_eps = 1.0;
  double sigma_u = 1.0;
  double a_init = 0.0;
  double theta_lo = 1.05;
  double theta_hi = 6.0;

  double alpha0() const { return delta0 / (1.0 - beta0); }
  double c0() const { return 1.0 - beta0; }
  ThetaBounds bounds() const { return {theta_lo, theta_hi}; }

  // Throws ParameterError unless 1 < theta_lo < theta0 < theta_hi < inf,
  // theta0 * (1 - beta0) > 1/2 and both noise scales are finite and >= 0.
  // A zero scale switches the corresponding noise off.
  void validate() const;
};

using Engine = std::mt19937_64;

// Draws one unit-variance, mean-zero innovation.
using InnovationSampler = std::function<double(Engine&)>;

InnovationSampler gaussian_sampler();
// Student-t with `dof` > 4 degrees of freedom rescaled to unit variance.
InnovationSampler student_t_sampler(double dof);

// Reproducible random stream for one replication. Substreams separate the
// eps, u and initial-value draws so that they never share engine state.
struct NoiseSource {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  enum class Substream : std::uint64_t { eps = 0, u = 1, a_init = 2 };

  Engine engine(Substream which) const;
};

std::uint64_t splitmix64(std::uint64_t x);

struct SimOptions {
  InnovationSampler eps_sampler;  // empty -> Gaussian
  InnovationSampler u_sampler;    // empty -> Gaussian
  // When > 0 the initial state is drawn as a_init + a_init_sd * N(0,1).
  double a_init_sd = 0.0;
};

struct SimPath {
  std::vector<double> eps;  // eps_1..eps_n
  std::vector<double> u;    // u_1..u_n
  std::vector<double> a;    // a_0..a_n
  std::vector<double> y;    // y_1..y_n
  std::vector<double> z;    // z_1..z_n

  std::size_t n() const { return y.size(); }
};

SimPath simulate_path(const ModelParams& params, std::size_t n, const NoiseSource& noise,
                      const SimOptions& opts = {});

// Builds the path from given innovation sequences (scaled by nothing: they are
// used verbatim as eps_t and u_t). `a_init` overrides params.a_init.
SimPath simulate_from_innovations(const ModelParams& params, std::span<const double> eps,
                                  std::span<const double> u, double a_init);

// Candidate learning filter: out[0] = a_start,
// out[t] = out[t-1] + (theta / t) * (y_t - out[t-1]).
std::vector<double> filter_candidate(double theta, double a_start, std::span<const double> y,
                                     ThetaBounds bounds = {});

// Filter with the initial-value effect removed: out[t] = alpha0 + sum_j
// g_{j,t}(theta) (y_j - alpha0) for t >= 1, out[0] = a_start.
std::vector<double> filter_dagger(double theta, double alpha0, std::span<const double> y,
                                  double a_start, ThetaBounds bounds = {});

// theta-derivatives of filter_dagger. orders[m-1][t] = d^m a_t / d theta^m,
// t = 0..n, all starting at zero.
struct FilterDerivatives {
  std::vector<std::vector<double>> orders;

  const std::vector<double>& order(int m) const { return orders.at(static_cast<std::size_t>(m - 1)); }
};

FilterDerivatives filter_derivatives(double theta, double alpha0, std::span<const double> y,
                                     int max_order, ThetaBounds bounds = {});

}  // namespace adlearn
