#include "adlearn/lemma_oracles.hpp"

#include <algorithm>
#include <cmath>

#include "adlearn/asymptotics.hpp"
#include "adlearn/errors.hpp"
#include "adlearn/parallel.hpp"

namespace adlearn {

namespace {

using Mat4 = std::array<std::array<double, 4>, 4>;

void require_increasing(std::span<const Index> ns, const char* who) {
  if (ns.empty()) throw DomainError(std::string(who) + ": empty n grid");
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] < 2 || (k > 0 && ns[k] <= ns[k - 1])) {
      throw DomainError(std::string(who) + ": n grid must be strictly increasing with n >= 2");
    }
  }
}

ModelParams with_alpha_start(ModelParams p) {
  p.a_init = p.alpha0();
  return p;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

const char* a5_item_name(A5Item item) {
  static const char* names[] = {"A5_i", "A5_ii", "A5_iii", "A5_iv", "A5_v", "A5_vi", "A5_vii", "A5_viii", "A5_ix"};
  return names[static_cast<int>(item)];
}

const char* a2_item_name(A2Item item) {
  static const char* names[] = {"A2_i", "A2_ii", "A2_iii", "A2_iv"};
  return names[static_cast<int>(item)];
}

double a5_g_closed(double theta, int r, int m) {
  const double rr = r;
  return std::pow(rr, -2.0 * m + 1.0) * std::pow(2.0 * theta / rr - 1.0, -2.0 * m - 1.0) * m *
         (m + (2.0 / rr) * (theta / rr - 1.0) * theta) * std::tgamma(2.0 * m - 1.0);
}

double lemma_a5_sum(const A5Query& q) {
  if (q.n < 1) throw DomainError("lemma_a5_sum: n must be >= 1");
  const Index n = q.n;
  const double dn = static_cast<double>(n);
  const auto N = static_cast<std::size_t>(n);

  switch (q.item) {
    case A5Item::i: {
      if (q.r != 1 && q.r != 2) throw DomainError("lemma_a5_sum: r must be 1 or 2");
      if (q.m < 1 || q.m > 4) throw DomainError("lemma_a5_sum: m must be in 1..4");
      const std::vector<double> gm = g_derivatives_batch(n, q.theta, q.m);
      double s = 0.0;
      for (std::size_t k = 0; k < N; ++k) s += gm[k] * gm[k] / std::pow(static_cast<double>(k + 1), q.r - 1);
      return std::pow(dn, q.r) * s;
    }
    case A5Item::ii: {
      if (q.m < 1 || q.m > 4) throw DomainError("lemma_a5_sum: m must be in 1..4");
      const std::vector<double> gm = g_derivatives_batch(n, q.theta, q.m);
      double s = 0.0;
      for (std::size_t k = 0; k < N; ++k) s += gm[k] / std::sqrt(static_cast<double>(k + 1));
      return std::sqrt(dn) * s;
    }
    default: break;
  }

  const std::vector<double> g = g_weights_batch(n, q.theta, 0.0);
  const std::vector<double> g0 = g_weights_batch(n, q.theta0, q.beta0);
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k) s += a[k] * b[k];
    return dn * s;
  };
  switch (q.item) {
    case A5Item::iii: return dot(g, g);
    case A5Item::iv: return dot(g, g0);
    case A5Item::v: return weighted_double_sum(g, g, q.theta0, q.beta0);
    case A5Item::vi: return weighted_double_sum(g, g0, q.theta0, q.beta0);
    default: break;
  }
  const std::vector<double> gd0 = g_derivatives_batch(n, q.theta0, 1);
  switch (q.item) {
    case A5Item::vii: return dot(gd0, g0);
    case A5Item::viii: return weighted_double_sum(gd0, g0, q.theta0, q.beta0);
    case A5Item::ix: return weighted_double_sum(gd0, gd0, q.theta0, q.beta0);
    default: break;
  }
  throw DomainError("lemma_a5_sum: unknown item");
}

double lemma_a5_limit(const A5Query& q) {
  const double th = q.theta;
  const double t0 = q.theta0;
  const double c0 = 1.0 - q.beta0;
  switch (q.item) {
    case A5Item::i: return a5_g_closed(th, q.r, q.m);
    case A5Item::ii: return std::tgamma(q.m + 1.0) / (std::pow(0.5 - th, q.m) * (2.0 * th - 1.0));
    case A5Item::iii: return th * th / (2.0 * th - 1.0);
    case A5Item::iv: return th * t0 / (c0 * t0 + th - 1.0);
    case A5Item::v: return th * th * t0 / ((2.0 * th - 1.0) * (c0 * t0 + th - 1.0));
    case A5Item::vi: return th * t0 * t0 / ((2.0 * c0 * t0 - 1.0) * (c0 * t0 + th - 1.0));
    case A5Item::vii: {
      const double k = t0 * (1.0 + c0) - 1.0;
      return t0 * (c0 * t0 - 1.0) / (k * k);
    }
    case A5Item::viii: {
      const double k = t0 * (1.0 + c0) - 1.0;
      return t0 * t0 * (c0 * t0 - 1.0) / ((2.0 * c0 * t0 - 1.0) * k * k);
    }
    case A5Item::ix: {
      const double k = (1.0 + c0) * t0 - 1.0;
      const double w = 2.0 * t0 - 1.0;
      return t0 * (t0 * (2.0 * c0 * (t0 - 1.0) * t0 + c0 - t0 + 2.0) - 1.0) / (w * w * w * k * k);
    }
  }
  throw DomainError("lemma_a5_limit: unknown item");
}

LemmaCheckResult check_a5(const A5Query& base, std::span<const Index> n_values, double rel_tol, double abs_tol,
                          double small_limit) {
  require_increasing(n_values, "check_a5");
  LemmaCheckResult res;
  res.lemma_id = a5_item_name(base.item);
  if (base.item == A5Item::i) res.lemma_id += "_m" + std::to_string(base.m) + "_r" + std::to_string(base.r);
  if (base.item == A5Item::ii) res.lemma_id += "_m" + std::to_string(base.m);
  res.limit_value = lemma_a5_limit(base);
  bool decreasing = true;
  for (Index n : n_values) {
    A5Query q = base;
    q.n = n;
    const double v = lemma_a5_sum(q);
    const double err = std::fabs(v - res.limit_value);
    if (!res.abs_errors.empty() && !(err < res.abs_errors.back())) decreasing = false;
    res.n_values.push_back(n);
    res.finite_n_values.push_back(v);
    res.abs_errors.push_back(err);
  }
  const double last = res.abs_errors.back();
  const bool close = std::fabs(res.limit_value) < small_limit ? last <= abs_tol
                                                              : last <= rel_tol * std::fabs(res.limit_value);
  res.passed = decreasing && close;
  return res;
}

std::vector<A5Query> default_a5_queries(double theta, double theta0, double beta0) {
  std::vector<A5Query> qs;
  auto add = [&](A5Item item, int m, int r) {
    A5Query q;
    q.item = item;
    q.theta = theta;
    q.theta0 = theta0;
    q.beta0 = beta0;
    q.m = m;
    q.r = r;
    qs.push_back(q);
  };
  for (int m = 1; m <= 2; ++m)
    for (int r = 1; r <= 2; ++r) add(A5Item::i, m, r);
  for (int m = 1; m <= 2; ++m) add(A5Item::ii, m, 1);
  for (A5Item it : {A5Item::iii, A5Item::iv, A5Item::v, A5Item::vi, A5Item::vii, A5Item::viii, A5Item::ix}) {
    add(it, 1, 1);
  }
  return qs;
}

double lemma_a2_limit(A2Item item, double theta, const ModelParams& p) {
  switch (item) {
    case A2Item::i: return moment_limit_aa(theta, p.theta0, p.beta0, p.sigma_eps);
    case A2Item::ii: return moment_limit_a0a(theta, p.theta0, p.beta0, p.sigma_eps);
    case A2Item::iii: return sigma_adot_sq(p.theta0, p.beta0, p.sigma_eps);
    case A2Item::iv: return sigma_a_adot(p.theta0, p.beta0, p.sigma_eps);
  }
  throw DomainError("lemma_a2_limit: unknown item");
}

std::array<double, 4> lemma_a2_path_moments(double theta, const ModelParams& p, const SimPath& path) {
  const double alpha0 = p.alpha0();
  const std::size_t n = path.n();
  if (n < 2) throw DomainError("lemma_a2_path_moments: n must be >= 2");
  const std::vector<double> b = filter_dagger(theta, alpha0, path.y, alpha0);
  const FilterDerivatives d = filter_derivatives(p.theta0, alpha0, path.y, 1);
  const std::vector<double>& ad = d.order(1);
  std::array<double, 4> s{};
  for (std::size_t t = 1; t <= n; ++t) {
    const double a = path.a[t] - alpha0;
    const double bt = b[t] - alpha0;
    s[0] += bt * bt;
    s[1] += a * bt;
    s[2] += ad[t] * ad[t];
    s[3] += a * ad[t];
  }
  const double L = std::log(static_cast<double>(n));
  for (double& v : s) v /= L;
  return s;
}

A2McResult lemma_a2_mc(double theta, const ModelParams& p, Index n, std::size_t reps, std::uint64_t seed,
                       unsigned threads) {
  if (reps < 2) throw DomainError("lemma_a2_mc: reps must be >= 2");
  const ModelParams q = with_alpha_start(p);
  q.validate();
  const auto per_rep = parallel_map<std::array<double, 4>>(reps, threads, [&](std::size_t r) {
    const SimPath path = simulate_path(q, static_cast<std::size_t>(n), NoiseSource{seed, r});
    return lemma_a2_path_moments(theta, q, path);
  });
  A2McResult out;
  for (int k = 0; k < 4; ++k) {
    std::vector<double> col(reps);
    for (std::size_t r = 0; r < reps; ++r) col[r] = per_rep[r][static_cast<std::size_t>(k)];
    out.mean[static_cast<std::size_t>(k)] = mean_of(col);
    out.se[static_cast<std::size_t>(k)] = se_of(col);
    out.limit[static_cast<std::size_t>(k)] = lemma_a2_limit(static_cast<A2Item>(k), theta, q);
  }
  const Index ns[] = {n};
  out.exact = exact_moments(theta, q, ns).front().scaled;
  return out;
}

std::vector<ExactMoments> exact_moments(double theta, const ModelParams& p, std::span<const Index> n_values) {
  require_increasing(n_values, "exact_moments");
  const double t0 = p.theta0;
  const double b0 = p.beta0;
  const double s2 = p.sigma_eps * p.sigma_eps;
  // State x = (a*, a*(theta), a*(theta0), adot), all zero at t = 0.
  Mat4 M{};
  Mat4 sum{};
  double lag_aa = 0.0, lag_ab = 0.0, lag_bb = 0.0;
  std::vector<ExactMoments> out;
  std::size_t next = 0;
  for (Index t = 1; t <= n_values.back(); ++t) {
    lag_aa += M[0][0];
    lag_ab += M[0][1];
    lag_bb += M[1][1];
    const double dt = static_cast<double>(t);
    Mat4 A{};
    A[0][0] = 1.0 - (1.0 - b0) * t0 / dt;
    A[1][0] = theta * b0 / dt;
    A[1][1] = 1.0 - theta / dt;
    A[2][0] = t0 * b0 / dt;
    A[2][2] = 1.0 - t0 / dt;
    A[3][0] = b0 / dt;
    A[3][2] = -1.0 / dt;
    A[3][3] = 1.0 - t0 / dt;
    const std::array<double, 4> h{t0 / dt, theta / dt, t0 / dt, 1.0 / dt};
    Mat4 AM{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += A[i][k] * M[k][j];
        AM[i][j] = s;
      }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += AM[i][k] * A[j][k];
        M[i][j] = s + s2 * h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(j)];
        sum[i][j] += M[i][j];
      }
    if (t == n_values[next]) {
      ExactMoments e;
      e.n = t;
      const double L = std::log(dt);
      e.scaled = {sum[1][1] / L, sum[0][1] / L, sum[3][3] / L, sum[0][3] / L};
      e.lag_aa = lag_aa;
      e.lag_ab = lag_ab;
      e.lag_bb = lag_bb;
      out.push_back(e);
      ++next;
    }
  }
  return out;
}

double exact_scaled_D2(double beta, const ExactMoments& m, const ModelParams& p) {
  const double b0 = p.beta0;
  return (b0 * b0 * m.lag_aa - 2.0 * beta * b0 * m.lag_ab + beta * beta * m.lag_bb) /
         std::log(static_cast<double>(m.n));
}

double joint_objective_gap(double beta, double theta, const ModelParams& p, const SimPath& path) {
  const double alpha0 = p.alpha0();
  double at = 0.0, q = 0.0, q0 = 0.0;
  for (std::size_t i = 0; i < path.n(); ++i) {
    const double ys = path.y[i] - alpha0;
    const double e = ys - beta * at;
    const double e0 = ys - p.beta0 * (path.a[i] - alpha0);
    q += e * e;
    q0 += e0 * e0;
    at += theta / static_cast<double>(i + 1) * (ys - at);
  }
  return q - q0;
}

RateResult lemma_a3_rate(int m, int r, const ModelParams& p, std::span<const Index> n_grid, std::size_t reps,
                         std::uint64_t seed, unsigned threads) {
  if (m < 1 || m > 4) throw DomainError("lemma_a3_rate: m must be in 1..4");
  if (r != 2 && r != 4) throw DomainError("lemma_a3_rate: r must be 2 or 4");
  if (reps < 1) throw DomainError("lemma_a3_rate: reps must be >= 1");
  require_increasing(n_grid, "lemma_a3_rate");
  p.validate();
  const auto per_rep = parallel_map<std::vector<double>>(reps, threads, [&](std::size_t rep) {
    const SimPath path = simulate_path(p, static_cast<std::size_t>(n_grid.back()), NoiseSource{seed, rep});
    const FilterDerivatives d = filter_derivatives(p.theta0, p.alpha0(), path.y, m);
    std::vector<double> v;
    for (Index n : n_grid) v.push_back(std::pow(std::fabs(d.order(m)[static_cast<std::size_t>(n)]), r));
    return v;
  });
  RateResult res;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    double s = 0.0;
    for (const auto& v : per_rep) s += v[k];
    const double root = std::pow(s / static_cast<double>(reps), 1.0 / r);
    res.n_values.push_back(n_grid[k]);
    res.moment_root.push_back(root);
    lx.push_back(std::log(static_cast<double>(n_grid[k])));
    ly.push_back(std::log(root));
  }
  if (lx.size() >= 2) {
    const double mx = mean_of(lx), my = mean_of(ly);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxy += (lx[k] - mx) * (ly[k] - my);
      sxx += (lx[k] - mx) * (lx[k] - mx);
    }
    res.slope = sxy / sxx;
  }
  return res;
}

double phi_sq_partial_sum(double theta, Index n) {
  if (n < 1) throw DomainError("phi_sq_partial_sum: n must be >= 1");
  double phi_prev = 1.0;
  double s = 0.0;
  for (Index t = 1; t <= n; ++t) {
    s += phi_prev * phi_prev;
    phi_prev *= 1.0 - theta / static_cast<double>(t);
  }
  return s;
}

std::vector<double> a4_path_gaps(const ModelParams& p, const SimPath& path, std::span<const double> theta_grid,
                                 std::span<const double> a_grid, std::span<const Index> n_grid) {
  require_increasing(n_grid, "a4_path_gaps");
  if (static_cast<std::size_t>(n_grid.back()) > path.n()) throw DomainError("a4_path_gaps: n exceeds path length");
  const double alpha0 = p.alpha0();
  const double a0 = path.a[0];
  std::vector<double> gaps(n_grid.size(), 0.0);
  for (double theta : theta_grid) {
    const std::vector<double> dag = filter_dagger(theta, alpha0, path.y, a0);
    for (double a : a_grid) {
      const std::vector<double> cand = filter_candidate(theta, a, path.y);
      double q = 0.0, qd = 0.0;
      std::size_t next = 0;
      for (std::size_t t = 1; t <= static_cast<std::size_t>(n_grid.back()); ++t) {
        const double e = path.z[t - 1] - cand[t - 1];
        const double ed = path.z[t - 1] - dag[t - 1];
        q += e * e;
        qd += ed * ed;
        if (t == static_cast<std::size_t>(n_grid[next])) {
          gaps[next] = std::max(gaps[next], std::fabs(q - qd));
          ++next;
        }
      }
    }
  }
  return gaps;
}

A4Decomposition a4_decomposition(double theta, double a, double a0, std::span<const double> y,
                                 std::span<const double> z) {
  if (y.size() != z.size() || y.empty()) throw DomainError("a4_decomposition: y and z must be nonempty and aligned");
  const std::vector<double> pa = filter_candidate(theta, a, y);
  const std::vector<double> p0 = filter_candidate(theta, a0, y);
  double q = 0.0, q0 = 0.0, sphi2 = 0.0, sphie = 0.0;
  double phi_prev = 1.0;
  for (std::size_t t = 1; t <= y.size(); ++t) {
    const double e = z[t - 1] - pa[t - 1];
    const double e0 = z[t - 1] - p0[t - 1];
    q += e * e;
    q0 += e0 * e0;
    sphi2 += phi_prev * phi_prev;
    sphie += std::fabs(phi_prev) * std::fabs(e0);
    phi_prev *= 1.0 - theta / static_cast<double>(t);
  }
  const double da = a - a0;
  return {std::fabs(q - q0), da * da * sphi2 + 2.0 * std::fabs(da) * sphie};
}

std::vector<double> lemma_a4_gap(const ModelParams& p, std::span<const double> theta_grid,
                                 std::span<const double> a_grid, std::span<const Index> n_grid, std::size_t reps,
                                 std::uint64_t seed, unsigned threads) {
  if (reps < 1) throw DomainError("lemma_a4_gap: reps must be >= 1");
  require_increasing(n_grid, "lemma_a4_gap");
  p.validate();
  const auto per_rep = parallel_map<std::vector<double>>(reps, threads, [&](std::size_t r) {
    const SimPath path = simulate_path(p, static_cast<std::size_t>(n_grid.back()), NoiseSource{seed, r});
    return a4_path_gaps(p, path, theta_grid, a_grid, n_grid);
  });
  std::vector<double> out(n_grid.size(), 0.0);
  for (const auto& v : per_rep)
    for (std::size_t k = 0; k < v.size(); ++k) out[k] += v[k];
  for (double& v : out) v /= static_cast<double>(reps);
  return out;
}

A1Stats a1_path_stats(int m, double alpha0, std::span<const double> y, std::span<const double> v,
                      std::span<const double> theta_grid) {
  if (y.size() != v.size()) throw DomainError("a1_path_stats: y and v lengths differ");
  A1Stats s;
  for (double theta : theta_grid) {
    const FilterDerivatives d = filter_derivatives(theta, alpha0, y, m);
    const std::vector<double>& x = d.order(m);
    double ss = 0.0, ssv = 0.0, sv = 0.0;
    for (std::size_t t = 1; t <= y.size(); ++t) {
      const double xv = x[t - 1];
      ss += xv * xv;
      ssv += xv * xv * v[t - 1] * v[t - 1];
      sv += xv * v[t - 1];
    }
    s.sum_sq = std::max(s.sum_sq, ss);
    s.sum_sq_v2 = std::max(s.sum_sq_v2, ssv);
    s.abs_sum_v = std::max(s.abs_sum_v, std::fabs(sv));
  }
  return s;
}

std::vector<A1Stats> lemma_a1_bounds(int m, const ModelParams& p, std::span<const Index> n_grid,
                                     std::span<const double> theta_grid, std::size_t reps, std::uint64_t seed,
                                     unsigned threads) {
  if (m < 1 || m > 4) throw DomainError("lemma_a1_bounds: m must be in 1..4");
  if (reps < 1) throw DomainError("lemma_a1_bounds: reps must be >= 1");
  require_increasing(n_grid, "lemma_a1_bounds");
  p.validate();
  const double alpha0 = p.alpha0();
  const auto per_rep = parallel_map<std::vector<A1Stats>>(reps, threads, [&](std::size_t r) {
    const SimPath path = simulate_path(p, static_cast<std::size_t>(n_grid.back()), NoiseSource{seed, r});
    std::vector<A1Stats> v;
    for (Index n : n_grid) {
      const auto len = static_cast<std::size_t>(n);
      v.push_back(a1_path_stats(m, alpha0, std::span<const double>(path.y).first(len),
                                std::span<const double>(path.u).first(len), theta_grid));
    }
    return v;
  });
  std::vector<A1Stats> out(n_grid.size());
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    const double L = std::log(static_cast<double>(n_grid[k])) * static_cast<double>(reps);
    for (const auto& v : per_rep) {
      out[k].sum_sq += v[k].sum_sq / L;
      out[k].sum_sq_v2 += v[k].sum_sq_v2 / L;
      out[k].abs_sum_v += v[k].abs_sum_v / L;
    }
  }
  return out;
}

}  // namespace adlearn
