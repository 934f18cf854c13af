#pragma once

// Product weights of the decreasing-gain recursion
//
//   Phi_{t,n+1}(theta, beta) = prod_{j=t+1}^{n} [1 - (1 - beta) theta / j]
//   g_{t,n}(theta, beta)     = (theta / t) Phi_{t,n+1}(theta, beta)
//
// their theta-derivatives at beta = 0, and the power-law surrogate
// f_{t,n}(theta) = theta t^(theta-1) n^(-theta).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace adlearn {

using Index = std::int64_t;

// Signed product over j = t+1..n; 1 for t == n. Requires 0 <= t <= n.
double phi(Index t, Index n, double theta, double beta);

// (theta / t) phi(t, n, theta, beta). Requires 1 <= t <= n.
double g_weight(Index t, Index n, double theta, double beta);

// d^m/dtheta^m g_{t,n}(theta, 0), m in 1..4, from the log-product sums
// S_k = sum_{i=t+1}^n (theta - i)^(-k). When theta is an integer k with
// t < k <= n the weight vanishes and the finite product-rule limit is returned.
double g_derivative(Index t, Index n, double theta, int m);

// Same quantity with the inner sums written through polygamma functions,
// sum_{i=t+1}^n (i - theta)^(-k) = zeta_k(t+1-theta) - zeta_k(n+1-theta).
// Requires t + 1 - theta > 0.
double g_derivative_polygamma(Index t, Index n, double theta, int m);

// m = 0: f_{t,n}(theta); m >= 1: f log^(m-1)(t/n) (log(t/n) + m/theta).
double f_surrogate(Index t, Index n, double theta, int m);

// {g_{t,n}(theta, beta)}_{t=1..n}; out[t-1] holds g_{t,n}. O(n).
std::vector<double> g_weights_batch(Index n, double theta, double beta);

// {d^m/dtheta^m g_{t,n}(theta, 0)}_{t=1..n} for m in 0..4 by a backward
// product-rule recursion that never divides by (theta - i). O(n m).
std::vector<double> g_derivatives_batch(Index n, double theta, int m);

// Signed prefix products P(k) = prod_{i<=k} (1 - c theta / i), k = 0..n, stored
// as sign, log-magnitude and a running count of exactly-zero factors so that
// ratios P(t)/P(j) never overflow or divide by zero.
class PrefixProducts {
 public:
  PrefixProducts(Index n, double theta, double beta);

  Index size() const { return n_; }

  // prod_{i=j+1}^{t} (1 - c theta / i) for 0 <= j <= t <= n.
  double ratio(Index j, Index t) const;

  // g_{j,t}(theta, beta) = (theta / j) ratio(j, t), 1 <= j <= t <= n.
  double g(Index j, Index t) const;

 private:
  Index n_;
  double theta_;
  std::vector<double> log_abs_;
  std::vector<std::int8_t> sign_;
  std::vector<Index> zeros_;
};

// n sum_{t=2}^{n} sum_{j=1}^{t-1} u_t v_j g_{j,t}(theta0, beta0) in O(n) via the
// running sum S_t = sum_{j<t} v_j g_{j,t}, S_{t+1} = (1 - c0 theta0/(t+1))
// (S_t + v_t theta0 / t). u and v are indexed from t = 1.
double weighted_double_sum(std::span<const double> u, std::span<const double> v, double theta0,
                           double beta0);

}  // namespace adlearn
