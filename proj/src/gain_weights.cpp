#include "adlearn/gain_weights.hpp"

#include <array>
#include <cmath>
#include <string>

#include "adlearn/errors.hpp"
#include "adlearn/special_functions.hpp"

namespace adlearn {

namespace {

void require_range(Index t, Index n, Index t_min, const char* who) {
  if (t < t_min || t > n) {
    throw DomainError(std::string(who) + ": index t = " + std::to_string(t) + " outside [" +
                      std::to_string(t_min) + ", " + std::to_string(n) + "]");
  }
}

void require_order(int m, int lo, int hi, const char* who) {
  if (m < lo || m > hi) throw DomainError(std::string(who) + ": order out of range");
}

// Complete Bell polynomial Y_m(L1..Lm) for m <= 4.
double bell(int m, const std::array<double, 5>& L) {
  switch (m) {
    case 0: return 1.0;
    case 1: return L[1];
    case 2: return L[1] * L[1] + L[2];
    case 3: return L[1] * L[1] * L[1] + 3.0 * L[1] * L[2] + L[3];
    case 4:
      return L[1] * L[1] * L[1] * L[1] + 6.0 * L[1] * L[1] * L[2] + 4.0 * L[1] * L[3] + 3.0 * L[2] * L[2] +
             L[4];
  }
  return 0.0;
}

// Turns p_k = theta^-k + sum (theta - i)^-k into the log-derivatives
// L_k = (-1)^(k-1) (k-1)! p_k.
std::array<double, 5> log_derivatives(const std::array<double, 5>& p) {
  constexpr double fact[5] = {1.0, 1.0, 1.0, 2.0, 6.0};
  std::array<double, 5> L{};
  for (int k = 1; k <= 4; ++k) L[k] = ((k % 2 == 1) ? 1.0 : -1.0) * fact[k] * p[k];
  return L;
}

// d^m/dtheta^m of (theta/t) prod_{j=t+1, j != skip}^{n} (1 - theta/j).
double product_derivative(Index t, Index n, double theta, int m, Index skip) {
  double h = theta / static_cast<double>(t);
  std::array<double, 5> p{};
  for (int k = 1; k <= m; ++k) p[k] = std::pow(theta, -k);
  for (Index i = t + 1; i <= n; ++i) {
    if (i == skip) continue;
    const double di = static_cast<double>(i);
    h *= 1.0 - theta / di;
    const double r = 1.0 / (theta - di);
    double rk = r;
    for (int k = 1; k <= m; ++k) {
      p[k] += rk;
      rk *= r;
    }
  }
  return h * bell(m, log_derivatives(p));
}

}  // namespace

double phi(Index t, Index n, double theta, double beta) {
  require_range(t, n, 0, "phi");
  const double c = 1.0 - beta;
  double prod = 1.0;
  for (Index j = t + 1; j <= n; ++j) prod *= 1.0 - c * theta / static_cast<double>(j);
  return prod;
}

double g_weight(Index t, Index n, double theta, double beta) {
  require_range(t, n, 1, "g_weight");
  return theta / static_cast<double>(t) * phi(t, n, theta, beta);
}

double g_derivative(Index t, Index n, double theta, int m) {
  require_range(t, n, 1, "g_derivative");
  require_order(m, 1, 4, "g_derivative");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("g_derivative: theta must be positive");
  if (t == n) return m == 1 ? 1.0 / static_cast<double>(n) : 0.0;

  const double r = std::round(theta);
  if (r == theta && r > static_cast<double>(t) && r <= static_cast<double>(n)) {
    // g = (1 - theta/k) h with k = theta, so g^(m)(k) = -(m/k) h^(m-1)(k).
    const auto k = static_cast<Index>(r);
    return -(static_cast<double>(m) / r) * product_derivative(t, n, theta, m - 1, k);
  }
  return product_derivative(t, n, theta, m, 0);
}

double g_derivative_polygamma(Index t, Index n, double theta, int m) {
  require_range(t, n, 1, "g_derivative_polygamma");
  require_order(m, 1, 4, "g_derivative_polygamma");
  const double lo = static_cast<double>(t) + 1.0 - theta;
  const double hi = static_cast<double>(n) + 1.0 - theta;
  if (!(lo > 0.0)) throw DomainError("g_derivative_polygamma: requires t + 1 - theta > 0");
  std::array<double, 5> p{};
  for (int k = 1; k <= m; ++k) {
    const double tail = zeta_tail(k, lo) - zeta_tail(k, hi);  // sum (i - theta)^-k
    p[k] = std::pow(theta, -k) + ((k % 2 == 0) ? tail : -tail);
  }
  return g_weight(t, n, theta, 0.0) * bell(m, log_derivatives(p));
}

double f_surrogate(Index t, Index n, double theta, int m) {
  require_range(t, n, 1, "f_surrogate");
  if (m < 0) throw DomainError("f_surrogate: order must be >= 0");
  const double dt = static_cast<double>(t);
  const double dn = static_cast<double>(n);
  const double f = theta * std::pow(dt, theta - 1.0) * std::pow(dn, -theta);
  if (m == 0) return f;
  const double l = std::log(dt / dn);
  return f * std::pow(l, m - 1) * (l + m / theta);
}

std::vector<double> g_weights_batch(Index n, double theta, double beta) {
  if (n < 1) throw DomainError("g_weights_batch: n must be >= 1");
  const double c = 1.0 - beta;
  std::vector<double> out(static_cast<std::size_t>(n));
  double prod = 1.0;
  for (Index t = n; t >= 1; --t) {
    const double dt = static_cast<double>(t);
    out[static_cast<std::size_t>(t - 1)] = theta / dt * prod;
    prod *= 1.0 - c * theta / dt;
  }
  return out;
}

std::vector<double> g_derivatives_batch(Index n, double theta, int m) {
  if (n < 1) throw DomainError("g_derivatives_batch: n must be >= 1");
  require_order(m, 0, 4, "g_derivatives_batch");
  // P[k] holds the k-th derivative of prod_{j=t+1}^{n} (1 - theta/j).
  std::array<double, 5> P{1.0, 0.0, 0.0, 0.0, 0.0};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Index t = n; t >= 1; --t) {
    const double dt = static_cast<double>(t);
    double v = theta / dt * P[static_cast<std::size_t>(m)];
    if (m > 0) v += m / dt * P[static_cast<std::size_t>(m - 1)];
    out[static_cast<std::size_t>(t - 1)] = v;
    const double f = 1.0 - theta / dt;
    for (int k = m; k >= 1; --k) P[static_cast<std::size_t>(k)] = f * P[static_cast<std::size_t>(k)] - k / dt * P[static_cast<std::size_t>(k - 1)];
    P[0] *= f;
  }
  return out;
}

PrefixProducts::PrefixProducts(Index n, double theta, double beta)
    : n_(n), theta_(theta), log_abs_(2 * static_cast<std::size_t>(n + 1)),
      sign_(static_cast<std::size_t>(n + 1)), zeros_(static_cast<std::size_t>(n + 1)) {
  if (n < 0) throw DomainError("PrefixProducts: n must be >= 0");
  const double c = 1.0 - beta;
  // Neumaier-compensated running log sum stored as (sum, compensation).
  double s = 0.0, comp = 0.0;
  std::int8_t sg = 1;
  Index zc = 0;
  log_abs_[0] = 0.0;
  log_abs_[1] = 0.0;
  sign_[0] = 1;
  zeros_[0] = 0;
  for (Index i = 1; i <= n; ++i) {
    const double f = 1.0 - c * theta / static_cast<double>(i);
    if (f == 0.0) {
      ++zc;
    } else {
      if (f < 0.0) sg = static_cast<std::int8_t>(-sg);
      const double x = std::log(std::fabs(f));
      const double tsum = s + x;
      comp += (std::fabs(s) >= std::fabs(x)) ? (s - tsum) + x : (x - tsum) + s;
      s = tsum;
    }
    const auto k = static_cast<std::size_t>(i);
    log_abs_[2 * k] = s;
    log_abs_[2 * k + 1] = comp;
    sign_[k] = sg;
    zeros_[k] = zc;
  }
}

double PrefixProducts::ratio(Index j, Index t) const {
  if (j < 0 || j > t || t > n_) throw DomainError("PrefixProducts::ratio: need 0 <= j <= t <= n");
  const auto a = static_cast<std::size_t>(j);
  const auto b = static_cast<std::size_t>(t);
  if (zeros_[b] != zeros_[a]) return 0.0;
  const double d = (log_abs_[2 * b] - log_abs_[2 * a]) + (log_abs_[2 * b + 1] - log_abs_[2 * a + 1]);
  return static_cast<double>(sign_[a] * sign_[b]) * std::exp(d);
}

double PrefixProducts::g(Index j, Index t) const {
  if (j < 1) throw DomainError("PrefixProducts::g: j must be >= 1");
  return theta_ / static_cast<double>(j) * ratio(j, t);
}

double weighted_double_sum(std::span<const double> u, std::span<const double> v, double theta0, double beta0) {
  if (u.size() != v.size()) throw DomainError("weighted_double_sum: length mismatch");
  const double c0 = 1.0 - beta0;
  double S = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = static_cast<double>(i + 1);
    total += u[i] * S;
    S = (1.0 - c0 * theta0 / (t + 1.0)) * (S + v[i] * theta0 / t);
  }
  return static_cast<double>(u.size()) * total;
}

}  // namespace adlearn
