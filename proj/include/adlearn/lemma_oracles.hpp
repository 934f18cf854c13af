#pragma once

// Numerical checks of the limit results behind the estimator asymptotics:
// weighted sums of gain weights, sample moments of the learning states, moment
// growth rates, the initial-value effect, and uniform-order bounds.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adlearn/gain_weights.hpp"
#include "adlearn/model.hpp"

namespace adlearn {

struct LemmaCheckResult {
  std::string lemma_id;
  std::vector<Index> n_values;
  std::vector<double> finite_n_values;
  double limit_value = 0.0;
  std::vector<double> abs_errors;
  bool passed = false;
};

// ---- weighted sums of gain weights ----------------------------------------

enum class A5Item { i, ii, iii, iv, v, vi, vii, viii, ix };

const char* a5_item_name(A5Item item);

struct A5Query {
  A5Item item = A5Item::iii;
  Index n = 1000;
  double theta = 1.6;   // free gain (items i-vi)
  double theta0 = 2.0;
  double beta0 = 0.25;
  int m = 1;            // derivative order (items i-ii)
  int r = 1;            // power (item i), 1 or 2
};

// Scaled finite-n sum. With g = g_{.,n}(theta, 0), g0 = g_{.,n}(theta0, beta0)
// and gd0 = d/dtheta g_{.,n}(theta0, 0), and DS(u, v) the weighted double sum:
//   i    n^r sum t^(1-r) (g^(m))^2        ii  n^(1/2) sum t^(-1/2) g^(m)
//   iii  n sum g^2                          iv  n sum g g0
//   v    DS(g, g)     vi  DS(g, g0)        vii n sum gd0 g0
//   viii DS(gd0, g0)  ix  DS(gd0, gd0)
double lemma_a5_sum(const A5Query& q);

// Closed-form limit of lemma_a5_sum as n grows.
double lemma_a5_limit(const A5Query& q);

// r^(-2m+1) (2 theta/r - 1)^(-2m-1) m (m + (2/r)(theta/r - 1) theta) Gamma(2m - 1)
double a5_g_closed(double theta, int r, int m);

// Passed when |error| strictly decreases along n_values and the last relative
// error is <= rel_tol (absolute <= abs_tol when |limit| < small_limit).
LemmaCheckResult check_a5(const A5Query& base, std::span<const Index> n_values, double rel_tol = 0.05,
                          double abs_tol = 1e-3, double small_limit = 0.02);

// The default suite: items i (m, r in {1,2}), ii (m in {1,2}) and iii-ix.
std::vector<A5Query> default_a5_queries(double theta = 1.6, double theta0 = 2.0, double beta0 = 0.25);

// ---- sample moments of the learning states -------------------------------

enum class A2Item { i, ii, iii, iv };

const char* a2_item_name(A2Item item);

// Limits of log^-1 n times
//   i  sum a*_t(theta)^2   ii  sum a*_t a*_t(theta)   iii  sum adot_t^2   iv  sum a*_t adot_t
// with a*_t = a_t - alpha0, a*_t(theta) the alpha0-started filter and adot_t
// its derivative at theta0.
double lemma_a2_limit(A2Item item, double theta, const ModelParams& p);

// The four scaled moments of one path (path simulated with a_init = alpha0).
std::array<double, 4> lemma_a2_path_moments(double theta, const ModelParams& p, const SimPath& path);

struct A2McResult {
  std::array<double, 4> mean{};
  std::array<double, 4> se{};
  std::array<double, 4> limit{};
  std::array<double, 4> exact{};  // exact finite-n expectation
};

// Monte Carlo over `reps` paths with stream ids 0..reps-1. The simulation uses
// a_init = alpha0 so that a*_t carries no initial-value transient.
A2McResult lemma_a2_mc(double theta, const ModelParams& p, Index n, std::size_t reps, std::uint64_t seed,
                       unsigned threads = 1);

// Exact expectations of the same moments for Gaussian or any other unit-variance
// noise, from the second-moment recursion of the linear state
// (a*_t, a*_t(theta), a*_t(theta0), adot_t). Also returns the expected lagged
// sums used for the joint objective.
struct ExactMoments {
  Index n = 0;
  std::array<double, 4> scaled{};  // log^-1 n E[...] for items i-iv
  double lag_aa = 0.0;             // E sum_{t<n} a*_t^2
  double lag_ab = 0.0;             // E sum_{t<n} a*_t a*_t(theta)
  double lag_bb = 0.0;             // E sum_{t<n} a*_t(theta)^2
};

std::vector<ExactMoments> exact_moments(double theta, const ModelParams& p, std::span<const Index> n_values);

// log^-1 n E[Q_2n(beta, theta) - Q_2n(beta0, theta0)] from the exact moments.
double exact_scaled_D2(double beta, const ExactMoments& m, const ModelParams& p);

// Profiled joint-objective difference Q_2n(beta, theta) - Q_2n(beta0, theta0)
// of one path (a*_0 = 0 for both filters).
double joint_objective_gap(double beta, double theta, const ModelParams& p, const SimPath& path);

// ---- growth rate of derivative moments ----------------------------------

struct RateResult {
  std::vector<Index> n_values;
  std::vector<double> moment_root;  // E^{1/r} |a^(m)_n(theta0)|^r
  double slope = 0.0;               // least-squares slope of log root on log n
};

RateResult lemma_a3_rate(int m, int r, const ModelParams& p, std::span<const Index> n_grid, std::size_t reps,
                         std::uint64_t seed, unsigned threads = 1);

// ---- initial-value effect --------------------------------------------------

// Coefficient of the initial value in a_t(theta, a): prod_{j=1}^{t} (1 - theta/j).
// Returns sum_{t=1}^{n} Phi_{t-1}(theta)^2.
double phi_sq_partial_sum(double theta, Index n);

// sup over the grids of |Q_n(theta, a) - Q_n^dagger(theta)| for one path, at
// every n in n_grid (increasing, <= path length).
std::vector<double> a4_path_gaps(const ModelParams& p, const SimPath& path, std::span<const double> theta_grid,
                                 std::span<const double> a_grid, std::span<const Index> n_grid);

struct A4Decomposition {
  double lhs = 0.0;  // |Q_n(theta, a) - Q_n(theta, a0)|
  double rhs = 0.0;  // (a - a0)^2 sum Phi^2 + 2|a - a0| sum |Phi| |e_t|
};

// e_t = z_t - a_{t-1}(theta, a0) is the residual of the a0-started filter.
A4Decomposition a4_decomposition(double theta, double a, double a0, std::span<const double> y,
                                 std::span<const double> z);

// Mean over reps of a4_path_gaps.
std::vector<double> lemma_a4_gap(const ModelParams& p, std::span<const double> theta_grid,
                                 std::span<const double> a_grid, std::span<const Index> n_grid, std::size_t reps,
                                 std::uint64_t seed, unsigned threads = 1);

// ---- uniform-order bounds --------------------------------------------------

struct A1Stats {
  double sum_sq = 0.0;      // sup_theta sum_t (a^(m)_{t-1}(theta))^2
  double sum_sq_v2 = 0.0;   // sup_theta sum_t (a^(m)_{t-1}(theta))^2 v_t^2
  double abs_sum_v = 0.0;   // sup_theta |sum_t a^(m)_{t-1}(theta) v_t|
};

A1Stats a1_path_stats(int m, double alpha0, std::span<const double> y, std::span<const double> v,
                      std::span<const double> theta_grid);

// Mean over reps of the path statistics divided by log n, one entry per n;
// v_t = u_t.
std::vector<A1Stats> lemma_a1_bounds(int m, const ModelParams& p, std::span<const Index> n_grid,
                                     std::span<const double> theta_grid, std::size_t reps, std::uint64_t seed,
                                     unsigned threads = 1);

}  // namespace adlearn
