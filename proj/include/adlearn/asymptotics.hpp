#pragma once

// Closed-form limits of the estimators and sample moments. Throughout
// c0 = 1 - beta0 and every function takes its noise scales explicitly.

#include <optional>

#include "adlearn/mat2.hpp"
#include "adlearn/model.hpp"

namespace adlearn {

// sigma_eps^2 theta0^2 / (2 c0 theta0 - 1)
double sigma_a_sq(double theta0, double beta0, double sigma_eps);

// (sigma_a/theta0)^2 ((2 c0 theta0 - 1) theta - (c0 theta0 - 1)) / ((2 theta - 1)(c0 theta0 + theta - 1))
double d_func(double theta, double theta0, double beta0, double sigma_eps);

// (theta - theta0)^2 d_func
double D_limit(double theta, double theta0, double beta0, double sigma_eps);

// (sigma_a/theta0)^2 (theta0(2 - beta0) - 2 theta0^2 c0 - 1) / ((2 theta0 - 1)(1 - theta0(2 - beta0)))
double sigma_adot_sq(double theta0, double beta0, double sigma_eps);

// (sigma_a/theta0)^2 theta0 (1 - c0 theta0) / (1 - theta0 (2 - beta0))
double sigma_a_adot(double theta0, double beta0, double sigma_eps);

// Asymptotic variance of sqrt(log n)(theta_hat - theta0): (sigma_u / sigma_adot)^2.
double theta_asvar(double theta0, double beta0, double sigma_u, double sigma_eps);

// Variance inflation of the feasible two-step estimator from the generated regressor.
double B_factor(double theta0, double beta0, double sigma_u, double sigma_eps);

// (2 c0 theta0 - 1)/theta0^2 [[alpha0^2, -alpha0], [-alpha0, 1]], order (delta, beta).
Mat2 V0_matrix(double theta0, double beta0, double alpha0);

struct KV2 {
  Mat2 K{};
  Mat2 V2{};
  double kappa_theta_var = 0.0;  // closed form, no noise scales
};

// K = [[sigma_a^2, beta0 sigma_a_adot], [beta0 sigma_a_adot, beta0^2 sigma_adot^2]],
// V2 = sigma_eps^2 K^-1, order (beta, theta). Throws AssumptionError when beta0 == 0.
KV2 K_and_V2(double theta0, double beta0, double sigma_eps);

// (2 theta0 - 1)(theta0 (2 - beta0) - 1)^2 / (beta0 theta0)^2
double kappa_theta_var(double theta0, double beta0);

// Limits of log^-1 n sum_t a*_t(theta)^2 and log^-1 n sum_t a*_t a*_t(theta),
// where a*_t = a_t - alpha0 and a*_t(theta) is the alpha0-started filter.
double moment_limit_aa(double theta, double theta0, double beta0, double sigma_eps);
double moment_limit_a0a(double theta, double theta0, double beta0, double sigma_eps);

// Limit of log^-1 n [Q_2n(beta, theta) - Q_2n(beta0, theta0)] built from the two
// moment limits: beta^2 S11(theta) + beta0^2 sigma_a^2 - 2 beta beta0 S01(theta).
double D1_limit(double beta, double theta, double theta0, double beta0, double sigma_eps);

// Asymptotic variance of sqrt(n)(ybar - alpha0); requires c0 theta0 != 1.
double alpha_hat_asvar(double theta0, double beta0, double sigma_eps);

struct LimitValues {
  double alpha0 = 0.0;
  double c0 = 0.0;
  double sigma_a_sq = 0.0;
  double sigma_adot_sq = 0.0;
  double sigma_a_adot = 0.0;
  double theta_asvar = 0.0;
  double B = 0.0;
  Mat2 V0{};
  Mat2 lambda_cov{};  // (1 + B) V0
  std::optional<KV2> joint;  // absent when beta0 == 0
  std::optional<double> alpha_hat_asvar;  // absent when c0 theta0 == 1
};

LimitValues compute_limits(const ModelParams& p);

}  // namespace adlearn
