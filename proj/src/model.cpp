#include "adlearn/model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "adlearn/errors.hpp"

namespace adlearn {

namespace {

void require_theta(double theta, ThetaBounds bounds) {
  if (!std::isfinite(theta) || !bounds.contains(theta)) {
    std::ostringstream os;
    os << "theta = " << theta << " outside [" << bounds.lo << ", " << bounds.hi << "]";
    throw DomainError(os.str());
  }
}

}  // namespace

void ModelParams::validate() const {
  auto fail = [](const std::string& what) { throw ParameterError("invalid model parameters: " + what); };
  for (double v : {theta0, beta0, delta0, sigma_eps, sigma_u, a_init, theta_lo, theta_hi}) {
    if (!std::isfinite(v)) fail("non-finite value");
  }
  if (!(theta_lo > 1.0)) fail("theta_lo must exceed 1");
  if (!(theta_lo < theta0 && theta0 < theta_hi)) fail("theta0 must lie strictly inside (theta_lo, theta_hi)");
  if (!(beta0 < 1.0)) fail("beta0 must be < 1");
  if (!(theta0 * (1.0 - beta0) > 0.5)) fail("theta0 * (1 - beta0) must exceed 1/2");
  if (sigma_eps < 0.0 || sigma_u < 0.0) fail("noise scales must be non-negative");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Engine NoiseSource::engine(Substream which) const {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
  s = splitmix64(s + static_cast<std::uint64_t>(which));
  return Engine(s);
}

InnovationSampler gaussian_sampler() {
  return [dist = std::normal_distribution<double>(0.0, 1.0)](Engine& e) mutable { return dist(e); };
}

InnovationSampler student_t_sampler(double dof) {
  if (!(dof > 4.0)) throw DomainError("student_t_sampler: dof must exceed 4 (finite fourth moment)");
  const double scale = std::sqrt((dof - 2.0) / dof);
  return [dist = std::student_t_distribution<double>(dof), scale](Engine& e) mutable { return scale * dist(e); };
}

SimPath simulate_from_innovations(const ModelParams& params, std::span<const double> eps,
                                  std::span<const double> u, double a_init) {
  if (eps.empty()) throw DomainError("simulate: n must be >= 1");
  if (eps.size() != u.size()) throw DomainError("simulate: eps and u lengths differ");
  const std::size_t n = eps.size();
  SimPath p;
  p.eps.assign(eps.begin(), eps.end());
  p.u.assign(u.begin(), u.end());
  p.a.resize(n + 1);
  p.y.resize(n);
  p.z.resize(n);
  p.a[0] = a_init;
  for (std::size_t t = 1; t <= n; ++t) {
    const double prev = p.a[t - 1];
    const double y = params.delta0 + params.beta0 * prev + p.eps[t - 1];
    p.y[t - 1] = y;
    p.z[t - 1] = prev + p.u[t - 1];
    p.a[t] = prev + (params.theta0 / static_cast<double>(t)) * (y - prev);
  }
  return p;
}

SimPath simulate_path(const ModelParams& params, std::size_t n, const NoiseSource& noise,
                      const SimOptions& opts) {
  params.validate();
  if (n == 0) throw DomainError("simulate_path: n must be >= 1");

  InnovationSampler eps_draw = opts.eps_sampler ? opts.eps_sampler : gaussian_sampler();
  InnovationSampler u_draw = opts.u_sampler ? opts.u_sampler : gaussian_sampler();

  std::vector<double> eps(n), u(n);
  Engine e_eps = noise.engine(NoiseSource::Substream::eps);
  Engine e_u = noise.engine(NoiseSource::Substream::u);
  for (std::size_t t = 0; t < n; ++t) eps[t] = params.sigma_eps * eps_draw(e_eps);
  for (std::size_t t = 0; t < n; ++t) u[t] = params.sigma_u * u_draw(e_u);

  double a_init = params.a_init;
  if (opts.a_init_sd > 0.0) {
    Engine e_a = noise.engine(NoiseSource::Substream::a_init);
    a_init += opts.a_init_sd * std::normal_distribution<double>(0.0, 1.0)(e_a);
  }
  return simulate_from_innovations(params, eps, u, a_init);
}

std::vector<double> filter_candidate(double theta, double a_start, std::span<const double> y,
                                     ThetaBounds bounds) {
  require_theta(theta, bounds);
  if (y.empty()) throw DomainError("filter_candidate: y must be nonempty");
  std::vector<double> out(y.size() + 1);
  out[0] = a_start;
  for (std::size_t t = 1; t <= y.size(); ++t) {
    out[t] = out[t - 1] + (theta / static_cast<double>(t)) * (y[t - 1] - out[t - 1]);
  }
  return out;
}

std::vector<double> filter_dagger(double theta, double alpha0, std::span<const double> y,
                                  double a_start, ThetaBounds bounds) {
  // Started at alpha0 the candidate recursion carries no initial-value term,
  // so it reproduces alpha0 + sum_j g_{j,t}(theta)(y_j - alpha0) exactly.
  std::vector<double> out = filter_candidate(theta, alpha0, y, bounds);
  out[0] = a_start;
  return out;
}

FilterDerivatives filter_derivatives(double theta, double alpha0, std::span<const double> y,
                                     int max_order, ThetaBounds bounds) {
  if (max_order < 1 || max_order > 4) throw DomainError("filter_derivatives: max_order must be in 1..4");
  require_theta(theta, bounds);
  if (y.empty()) throw DomainError("filter_derivatives: y must be nonempty");

  const std::size_t n = y.size();
  const auto orders = static_cast<std::size_t>(max_order);
  FilterDerivatives out;
  out.orders.assign(orders, std::vector<double>(n + 1, 0.0));

  double level = alpha0;
  for (std::size_t t = 1; t <= n; ++t) {
    const double inv_t = 1.0 / static_cast<double>(t);
    const double keep = 1.0 - theta * inv_t;
    // Highest order first so that lower orders still hold time t-1 values.
    for (std::size_t m = orders; m >= 2; --m) {
      auto& cur = out.orders[m - 1];
      cur[t] = cur[t - 1] * keep - static_cast<double>(m) * inv_t * out.orders[m - 2][t - 1];
    }
    auto& first = out.orders[0];
    first[t] = first[t - 1] * keep + inv_t * (y[t - 1] - level);
    level += theta * inv_t * (y[t - 1] - level);
  }
  return out;
}

}  // namespace adlearn
