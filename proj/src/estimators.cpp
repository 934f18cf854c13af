#include "adlearn/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adlearn/errors.hpp"
#include "adlearn/kernels.hpp"

namespace adlearn {

namespace {

struct Best {
  double x = 0.0;
  double f = std::numeric_limits<double>::infinity();

  void offer(double xv, double fv) {
    if (fv < f || (fv == f && xv < x)) {
      x = xv;
      f = fv;
    }
  }
};

std::vector<double> uniform_grid(ThetaBounds b, int size) {
  std::vector<double> g(static_cast<std::size_t>(size));
  for (int k = 0; k < size; ++k) g[static_cast<std::size_t>(k)] = b.lo + (b.hi - b.lo) * k / (size - 1);
  g.back() = b.hi;
  return g;
}

void check_bounds(ThetaBounds b, const char* who) {
  if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
    throw DomainError(std::string(who) + ": theta bounds must be finite with lo < hi");
  }
}

void check_grid(int grid_size, double tol, const char* who) {
  if (grid_size < 3) throw DomainError(std::string(who) + ": grid size must be >= 3");
  if (!(tol > 0.0)) throw DomainError(std::string(who) + ": tolerance must be positive");
}

// Golden-section search on [lo, hi]; every evaluation is offered to `best`.
template <class F>
int golden_section(F&& f, double lo, double hi, double tol, Best& best) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  best.offer(c, fc);
  best.offer(d, fd);
  int iters = 0;
  while (hi - lo > tol && iters < 200) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = f(c);
      best.offer(c, fc);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = f(d);
      best.offer(d, fd);
    }
    ++iters;
  }
  const double mid = 0.5 * (lo + hi);
  best.offer(mid, f(mid));
  return iters;
}

ProfilePoint profile_at(double theta, double sxy, double sxx, double syy, const KappaOptions& opts) {
  if (!(sxx > 0.0)) throw DegenerateRegressorError("joint_kappa: sum of squared predictors is zero");
  ProfilePoint p;
  p.theta = theta;
  double b = sxy / sxx;
  if (b < opts.beta_lo || b > opts.beta_hi) {
    b = std::clamp(b, opts.beta_lo, opts.beta_hi);
    p.beta_clipped = true;
  }
  p.beta = b;
  p.q = syy - 2.0 * b * sxy + b * b * sxx;
  return p;
}

double centered_syy(std::span<const double> y, double alpha) {
  double s = 0.0;
  for (double v : y) s += (v - alpha) * (v - alpha);
  return s;
}

void check_kappa_opts(const KappaOptions& opts) {
  check_grid(opts.grid_size, opts.tol_theta, "joint_kappa");
  if (!(opts.beta_lo < opts.beta_hi) || !(opts.beta_hi < 1.0)) {
    throw DomainError("joint_kappa: beta bounds must satisfy beta_lo < beta_hi < 1");
  }
}

}  // namespace

ThetaFit nls_theta(std::span<const double> z, std::span<const double> y, ThetaBounds bounds, double a_start,
                   const NlsOptions& opts) {
  if (z.size() != y.size()) throw DomainError("nls_theta: z and y lengths differ");
  if (y.size() < 2) throw DomainError("nls_theta: n must be >= 2");
  check_bounds(bounds, "nls_theta");
  if (!(bounds.lo > 1.0)) throw DomainError("nls_theta: lower gain bound must exceed 1");
  check_grid(opts.grid_size, opts.tol_theta, "nls_theta");

  const std::vector<double> grid = uniform_grid(bounds, opts.grid_size);
  std::vector<double> q(grid.size());
  kernels::nls_objective(grid, a_start, y, z, q);

  Best best;
  std::size_t bi = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(q[k])) throw EstimationError("nls_theta: non-finite objective at theta = " + std::to_string(grid[k]));
    if (q[k] < q[bi]) bi = k;
  }
  best.offer(grid[bi], q[bi]);

  auto objective = [&](double theta) {
    const double v = kernels::nls_objective_one(theta, a_start, y, z);
    if (!std::isfinite(v)) throw EstimationError("nls_theta: non-finite objective during refinement");
    return v;
  };
  const double lo = grid[bi == 0 ? 0 : bi - 1];
  const double hi = grid[std::min(bi + 1, grid.size() - 1)];

  ThetaFit fit;
  fit.refine_iters = golden_section(objective, lo, hi, opts.tol_theta, best);
  fit.theta_hat = best.x;
  fit.q_min = best.f;
  fit.n_grid = opts.grid_size;
  fit.at_boundary = bi == 0 || bi == grid.size() - 1;
  return fit;
}

LambdaFit ols_lambda(std::span<const double> y, std::span<const double> a_path) {
  const std::size_t n = y.size();
  if (n < 3) throw DomainError("ols_lambda: n must be >= 3");
  if (a_path.size() != n + 1) throw DomainError("ols_lambda: a_path must have length n + 1");

  double sa = 0.0, saa = 0.0, sy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    sa += a_path[t];
    saa += a_path[t] * a_path[t];
    sy += y[t];
  }
  const double dn = static_cast<double>(n);
  const double abar = sa / dn;
  const double ybar = sy / dn;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double da = a_path[t] - abar;
    sxx += da * da;
    sxy += da * (y[t] - ybar);
  }

  LambdaFit fit;
  fit.gram = {{{dn, sa}, {sa, saa}}};
  fit.det_gram = dn * sxx;  // n sum a^2 - (sum a)^2 without the cancellation
  if (!(saa > 0.0) || !(fit.det_gram > 1e-12 * dn * saa)) {
    throw CollinearityError("ols_lambda: regressors (1, a_{t-1}) are collinear");
  }
  fit.beta_hat = sxy / sxx;
  fit.delta_hat = ybar - fit.beta_hat * abar;
  return fit;
}

TwoStepFit two_step(std::span<const double> z, std::span<const double> y, ThetaBounds bounds,
                    const TwoStepOptions& opts) {
  if (z.empty()) throw DomainError("two_step: empty sample");
  const double a_start = opts.a_start.value_or(z[0]);
  TwoStepFit out;
  out.theta = nls_theta(z, y, bounds, a_start, opts.nls);
  const std::vector<double> path = filter_candidate(out.theta.theta_hat, a_start, y, bounds);
  out.lambda = ols_lambda(y, path);
  return out;
}

double alpha_hat(std::span<const double> y) {
  if (y.empty()) throw DomainError("alpha_hat: n must be >= 1");
  double s = 0.0;
  for (double v : y) s += v;
  return s / static_cast<double>(y.size());
}

std::vector<ProfilePoint> kappa_profile(std::span<const double> y, double alpha, std::span<const double> thetas,
                                        const KappaOptions& opts) {
  if (y.size() < 3) throw DomainError("joint_kappa: n must be >= 3");
  std::vector<double> sxy(thetas.size()), sxx(thetas.size());
  kernels::profile_moments(thetas, alpha, y, sxy, sxx);
  const double syy = centered_syy(y, alpha);
  std::vector<ProfilePoint> out;
  out.reserve(thetas.size());
  for (std::size_t k = 0; k < thetas.size(); ++k) out.push_back(profile_at(thetas[k], sxy[k], sxx[k], syy, opts));
  return out;
}

KappaFit joint_kappa(std::span<const double> y, double alpha, ThetaBounds bounds, const KappaOptions& opts) {
  check_bounds(bounds, "joint_kappa");
  check_kappa_opts(opts);
  const std::vector<double> grid = uniform_grid(bounds, opts.grid_size);
  const std::vector<ProfilePoint> prof = kappa_profile(y, alpha, grid, opts);

  std::size_t bi = 0;
  for (std::size_t k = 0; k < prof.size(); ++k) {
    if (!std::isfinite(prof[k].q)) throw EstimationError("joint_kappa: non-finite objective");
    if (prof[k].q < prof[bi].q) bi = k;
  }
  Best best;
  best.offer(grid[bi], prof[bi].q);

  const double syy = centered_syy(y, alpha);
  auto point = [&](double theta) {
    double sxy = 0.0, sxx = 0.0;
    kernels::profile_moments(std::span<const double>(&theta, 1), alpha, y, std::span<double>(&sxy, 1),
                             std::span<double>(&sxx, 1));
    return profile_at(theta, sxy, sxx, syy, opts);
  };
  auto objective = [&](double theta) { return point(theta).q; };
  golden_section(objective, grid[bi == 0 ? 0 : bi - 1], grid[std::min(bi + 1, grid.size() - 1)], opts.tol_theta,
                 best);

  const ProfilePoint p = point(best.x);
  KappaFit fit;
  fit.theta_hat = best.x;
  fit.beta_hat = p.beta;
  fit.q_min = best.f;
  fit.alpha_used = alpha;
  fit.delta_hat_implied = alpha * (1.0 - p.beta);
  fit.beta_at_boundary = p.beta_clipped;
  fit.theta_at_boundary = bi == 0 || bi == grid.size() - 1;
  return fit;
}

FlatnessDiagnostic profile_flatness(std::span<const double> y, double alpha, ThetaBounds bounds,
                                    const KappaOptions& opts, double critical) {
  check_bounds(bounds, "profile_flatness");
  check_kappa_opts(opts);
  const std::vector<double> grid = uniform_grid(bounds, opts.grid_size);
  const std::vector<ProfilePoint> prof = kappa_profile(y, alpha, grid, opts);
  double lo = prof.front().q, hi = prof.front().q;
  for (const auto& p : prof) {
    lo = std::min(lo, p.q);
    hi = std::max(hi, p.q);
  }
  FlatnessDiagnostic d;
  d.range = hi - lo;
  d.sigma2_hat = lo / static_cast<double>(y.size());
  d.statistic = d.sigma2_hat > 0.0 ? d.range / d.sigma2_hat : std::numeric_limits<double>::infinity();
  d.critical = critical;
  d.flat = d.statistic < critical;
  return d;
}

EstimateSet estimate_all(std::span<const double> z, std::span<const double> y, ThetaBounds bounds,
                         const EstimateOptions& opts, std::optional<double> theta0) {
  EstimateSet out;
  const TwoStepFit ts = two_step(z, y, bounds, opts.two_step);
  out.theta = ts.theta;
  out.lambda = ts.lambda;
  if (theta0) {
    const double a_start = opts.two_step.a_start.value_or(z[0]);
    out.lambda_infeasible = ols_lambda(y, filter_candidate(*theta0, a_start, y));
  }
  out.alpha_hat = alpha_hat(y);
  out.kappa = joint_kappa(y, opts.alpha.value_or(out.alpha_hat), bounds, opts.kappa);
  return out;
}

}  // namespace adlearn
