#pragma once

#include <optional>
#include <span>
#include <vector>

#include "adlearn/mat2.hpp"
#include "adlearn/model.hpp"

namespace adlearn {

struct NlsOptions {
  int grid_size = 64;
  double tol_theta = 1e-7;
};

struct ThetaFit {
  double theta_hat = 0.0;
  double q_min = 0.0;
  int n_grid = 0;
  int refine_iters = 0;
  bool at_boundary = false;  // coarse-grid minimum at an endpoint
};

// argmin over [bounds.lo, bounds.hi] of Q(theta) = sum_t (z_t - a_{t-1}(theta, a_start))^2.
// Coarse uniform grid, then golden section on the bracketing triple. The best
// evaluated point is returned, so q_min never exceeds the grid minimum. Grid
// ties go to the smaller theta.
ThetaFit nls_theta(std::span<const double> z, std::span<const double> y, ThetaBounds bounds, double a_start,
                   const NlsOptions& opts = {});

struct LambdaFit {
  double delta_hat = 0.0;
  double beta_hat = 0.0;
  Mat2 gram{};  // sum_t w_t w_t', w_t = (1, a_{t-1})
  double det_gram = 0.0;
};

// OLS of y_t on (1, a_{t-1}); a_path holds a_0..a_n. Throws CollinearityError
// when det(gram) <= 1e-12 n sum a_{t-1}^2.
LambdaFit ols_lambda(std::span<const double> y, std::span<const double> a_path);

struct TwoStepOptions {
  NlsOptions nls;
  std::optional<double> a_start;  // default: z_1
};

struct TwoStepFit {
  ThetaFit theta;
  LambdaFit lambda;
};

TwoStepFit two_step(std::span<const double> z, std::span<const double> y, ThetaBounds bounds,
                    const TwoStepOptions& opts = {});

// Sample mean of y.
double alpha_hat(std::span<const double> y);

struct KappaOptions {
  int grid_size = 64;
  double tol_theta = 1e-7;
  double beta_lo = -0.95;
  double beta_hi = 0.95;
};

struct KappaFit {
  double beta_hat = 0.0;
  double theta_hat = 0.0;
  double delta_hat_implied = 0.0;  // alpha (1 - beta_hat)
  double alpha_used = 0.0;
  double q_min = 0.0;
  bool beta_at_boundary = false;
  bool theta_at_boundary = false;
};

// Profiled value of sum_t (y*_t - beta a*_{t-1}(theta))^2 at one gain, with
// the inner beta concentrated out and clipped to [beta_lo, beta_hi].
struct ProfilePoint {
  double theta = 0.0;
  double beta = 0.0;
  double q = 0.0;
  bool beta_clipped = false;
};

std::vector<ProfilePoint> kappa_profile(std::span<const double> y, double alpha, std::span<const double> thetas,
                                        const KappaOptions& opts = {});

// Joint estimator of (beta, theta) with alpha plugged in.
KappaFit joint_kappa(std::span<const double> y, double alpha, ThetaBounds bounds, const KappaOptions& opts = {});

// Flatness of the profiled joint objective in theta. statistic is
// (max - min of the profile over the grid) / (min / n); below `critical` the
// gain is declared not identified.
struct FlatnessDiagnostic {
  double range = 0.0;
  double sigma2_hat = 0.0;
  double statistic = 0.0;
  double critical = 0.0;
  bool flat = false;
};

FlatnessDiagnostic profile_flatness(std::span<const double> y, double alpha, ThetaBounds bounds,
                                    const KappaOptions& opts = {}, double critical = 10.83);

struct EstimateSet {
  ThetaFit theta;
  LambdaFit lambda;                         // feasible, at theta_hat
  std::optional<LambdaFit> lambda_infeasible;  // at the true theta0 when known
  KappaFit kappa;
  double alpha_hat = 0.0;
};

struct EstimateOptions {
  TwoStepOptions two_step;
  KappaOptions kappa;
  std::optional<double> alpha;  // default: alpha_hat(y)
};

EstimateSet estimate_all(std::span<const double> z, std::span<const double> y, ThetaBounds bounds,
                         const EstimateOptions& opts = {}, std::optional<double> theta0 = std::nullopt);

}  // namespace adlearn
