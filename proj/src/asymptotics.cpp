#include "adlearn/asymptotics.hpp"

#include <cmath>
#include <string>

#include "adlearn/errors.hpp"

namespace adlearn {

namespace {

double nonzero(double v, const char* what) {
  if (v == 0.0 || !std::isfinite(v)) throw AssumptionError(std::string(what) + ": zero denominator");
  return v;
}

void require_stable(double theta0, double beta0, const char* who) {
  if (!((1.0 - beta0) * theta0 > 0.5)) {
    throw AssumptionError(std::string(who) + ": requires theta0 (1 - beta0) > 1/2");
  }
}

}  // namespace

double sigma_a_sq(double theta0, double beta0, double sigma_eps) {
  require_stable(theta0, beta0, "sigma_a_sq");
  const double c0 = 1.0 - beta0;
  return sigma_eps * sigma_eps * theta0 * theta0 / (2.0 * c0 * theta0 - 1.0);
}

double d_func(double theta, double theta0, double beta0, double sigma_eps) {
  const double c0 = 1.0 - beta0;
  const double s = sigma_a_sq(theta0, beta0, sigma_eps) / (theta0 * theta0);
  const double den = nonzero((2.0 * theta - 1.0) * (c0 * theta0 + theta - 1.0), "d_func");
  return s * ((2.0 * c0 * theta0 - 1.0) * theta - (c0 * theta0 - 1.0)) / den;
}

double D_limit(double theta, double theta0, double beta0, double sigma_eps) {
  return (theta - theta0) * (theta - theta0) * d_func(theta, theta0, beta0, sigma_eps);
}

double sigma_adot_sq(double theta0, double beta0, double sigma_eps) {
  const double c0 = 1.0 - beta0;
  const double s = sigma_a_sq(theta0, beta0, sigma_eps) / (theta0 * theta0);
  const double num = theta0 * (2.0 - beta0) - 2.0 * theta0 * theta0 * c0 - 1.0;
  const double den = nonzero((2.0 * theta0 - 1.0) * (1.0 - theta0 * (2.0 - beta0)), "sigma_adot_sq");
  return s * num / den;
}

double sigma_a_adot(double theta0, double beta0, double sigma_eps) {
  const double c0 = 1.0 - beta0;
  const double s = sigma_a_sq(theta0, beta0, sigma_eps) / (theta0 * theta0);
  return s * theta0 * (1.0 - c0 * theta0) / nonzero(1.0 - theta0 * (2.0 - beta0), "sigma_a_adot");
}

double theta_asvar(double theta0, double beta0, double sigma_u, double sigma_eps) {
  return sigma_u * sigma_u / nonzero(sigma_adot_sq(theta0, beta0, sigma_eps), "theta_asvar");
}

double B_factor(double theta0, double beta0, double sigma_u, double sigma_eps) {
  require_stable(theta0, beta0, "B_factor");
  const double c0 = 1.0 - beta0;
  const double m = c0 * theta0 - 1.0;
  const double num = beta0 * beta0 * (2.0 * theta0 - 1.0) * m * m;
  const double den = ((2.0 - beta0) * theta0 - 1.0) * (1.0 + theta0 * (c0 * (2.0 * theta0 - 1.0) - 1.0));
  const double r = sigma_u / nonzero(sigma_eps, "B_factor");
  return num / nonzero(den, "B_factor") * r * r;
}

Mat2 V0_matrix(double theta0, double beta0, double alpha0) {
  require_stable(theta0, beta0, "V0_matrix");
  const double s = (2.0 * (1.0 - beta0) * theta0 - 1.0) / (theta0 * theta0);
  return {{{s * alpha0 * alpha0, -s * alpha0}, {-s * alpha0, s}}};
}

KV2 K_and_V2(double theta0, double beta0, double sigma_eps) {
  if (beta0 == 0.0) throw AssumptionError("K_and_V2: the gain is not identified when beta0 = 0");
  KV2 r;
  const double sa2 = sigma_a_sq(theta0, beta0, sigma_eps);
  const double saad = sigma_a_adot(theta0, beta0, sigma_eps);
  const double sad2 = sigma_adot_sq(theta0, beta0, sigma_eps);
  r.K = {{{sa2, beta0 * saad}, {beta0 * saad, beta0 * beta0 * sad2}}};
  if (!(det(r.K) > 0.0)) throw AssumptionError("K_and_V2: K is not positive definite");
  r.V2 = (sigma_eps * sigma_eps) * inverse(r.K);
  r.kappa_theta_var = kappa_theta_var(theta0, beta0);
  return r;
}

double kappa_theta_var(double theta0, double beta0) {
  if (beta0 == 0.0) throw AssumptionError("kappa_theta_var: undefined for beta0 = 0");
  const double m = theta0 * (2.0 - beta0) - 1.0;
  return (2.0 * theta0 - 1.0) * m * m / ((beta0 * theta0) * (beta0 * theta0));
}

double moment_limit_aa(double theta, double theta0, double beta0, double sigma_eps) {
  require_stable(theta0, beta0, "moment_limit_aa");
  const double c0 = 1.0 - beta0;
  const double lead = sigma_eps * sigma_eps * theta * theta / nonzero(2.0 * theta - 1.0, "moment_limit_aa");
  const double corr = 2.0 * theta0 * (1.0 - c0) * (theta0 * (1.0 + c0) - 1.0) /
                      nonzero((2.0 * c0 * theta0 - 1.0) * (c0 * theta0 + theta - 1.0), "moment_limit_aa");
  return lead * (1.0 + corr);
}

double moment_limit_a0a(double theta, double theta0, double beta0, double sigma_eps) {
  require_stable(theta0, beta0, "moment_limit_a0a");
  const double c0 = 1.0 - beta0;
  const double den = nonzero((c0 * theta0 + theta - 1.0) * (2.0 * c0 * theta0 - 1.0), "moment_limit_a0a");
  return sigma_eps * sigma_eps * theta * theta0 * ((1.0 + c0) * theta0 - 1.0) / den;
}

double D1_limit(double beta, double theta, double theta0, double beta0, double sigma_eps) {
  return beta * beta * moment_limit_aa(theta, theta0, beta0, sigma_eps) +
         beta0 * beta0 * sigma_a_sq(theta0, beta0, sigma_eps) -
         2.0 * beta * beta0 * moment_limit_a0a(theta, theta0, beta0, sigma_eps);
}

double alpha_hat_asvar(double theta0, double beta0, double sigma_eps) {
  // sum_t y*_t = [beta0 n a*_n + (1 - theta0) sum_t eps_t] / (1 - c0 theta0)
  const double c0 = 1.0 - beta0;
  const double s2 = sigma_eps * sigma_eps;
  const double den = nonzero(1.0 - c0 * theta0, "alpha_hat_asvar");
  const double num = beta0 * beta0 * sigma_a_sq(theta0, beta0, sigma_eps) + (1.0 - theta0) * (1.0 - theta0) * s2 +
                     2.0 * beta0 * (1.0 - theta0) * s2 / c0;
  return num / (den * den);
}

LimitValues compute_limits(const ModelParams& p) {
  p.validate();
  LimitValues v;
  v.alpha0 = p.alpha0();
  v.c0 = p.c0();
  v.sigma_a_sq = sigma_a_sq(p.theta0, p.beta0, p.sigma_eps);
  v.sigma_adot_sq = sigma_adot_sq(p.theta0, p.beta0, p.sigma_eps);
  v.sigma_a_adot = sigma_a_adot(p.theta0, p.beta0, p.sigma_eps);
  v.theta_asvar = theta_asvar(p.theta0, p.beta0, p.sigma_u, p.sigma_eps);
  v.B = B_factor(p.theta0, p.beta0, p.sigma_u, p.sigma_eps);
  v.V0 = V0_matrix(p.theta0, p.beta0, v.alpha0);
  v.lambda_cov = (1.0 + v.B) * v.V0;
  if (p.beta0 != 0.0) v.joint = K_and_V2(p.theta0, p.beta0, p.sigma_eps);
  if (p.c0() * p.theta0 != 1.0) v.alpha_hat_asvar = alpha_hat_asvar(p.theta0, p.beta0, p.sigma_eps);
  return v;
}

}  // namespace adlearn
