#include "adlearn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "adlearn/asymptotics.hpp"
#include "adlearn/errors.hpp"
#include "adlearn/parallel.hpp"

namespace adlearn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ95 = 1.959963984540054;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end == nullptr || *end != '\0') throw ConfigError(key + ": expected a number, got '" + v + "'");
  return d;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": integer out of range");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

EstimatorKind parse_estimator(const std::string& v) {
  for (auto k : {EstimatorKind::nls_theta, EstimatorKind::two_step, EstimatorKind::infeasible_ols,
                 EstimatorKind::joint_kappa, EstimatorKind::alpha_hat}) {
    if (v == estimator_name(k)) return k;
  }
  throw ConfigError("unknown estimator '" + v + "'");
}

bool nan_eq(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

// ---- per-replication work -------------------------------------------------

struct CellEstimate {
  bool ok = false;
  std::vector<double> value;
  std::vector<double> plugin_sd;  // empty unless plugin CIs are requested
};

std::vector<std::string> coordinates(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::nls_theta: return {"theta"};
    case EstimatorKind::two_step:
    case EstimatorKind::infeasible_ols: return {"delta", "beta"};
    case EstimatorKind::joint_kappa: return {"beta", "theta", "delta"};
    case EstimatorKind::alpha_hat: return {"alpha"};
  }
  return {};
}

std::vector<double> truths(EstimatorKind k, const ModelParams& p) {
  switch (k) {
    case EstimatorKind::nls_theta: return {p.theta0};
    case EstimatorKind::two_step:
    case EstimatorKind::infeasible_ols: return {p.delta0, p.beta0};
    case EstimatorKind::joint_kappa: return {p.beta0, p.theta0, p.delta0};
    case EstimatorKind::alpha_hat: return {p.alpha0()};
  }
  return {};
}

double scale_of(EstimatorKind k, std::size_t n) {
  const double dn = static_cast<double>(n);
  return k == EstimatorKind::alpha_hat ? dn : std::log(dn);
}

template <class F>
double guarded(F&& f) {
  try {
    const double v = f();
    return std::isfinite(v) ? v : kNaN;
  } catch (const std::exception&) {
    return kNaN;
  }
}

// Asymptotic sd of the scaled error of each coordinate at parameter point p.
std::vector<double> theory_sds(EstimatorKind k, const ModelParams& p) {
  const double t0 = p.theta0, b0 = p.beta0, se = p.sigma_eps, su = p.sigma_u;
  switch (k) {
    case EstimatorKind::nls_theta: return {guarded([&] { return std::sqrt(theta_asvar(t0, b0, su, se)); })};
    case EstimatorKind::two_step:
    case EstimatorKind::infeasible_ols: {
      const double infl = k == EstimatorKind::two_step ? guarded([&] { return 1.0 + B_factor(t0, b0, su, se); }) : 1.0;
      const Mat2 V0 = V0_matrix(t0, b0, p.alpha0());
      return {std::sqrt(infl * V0[0][0]), std::sqrt(infl * V0[1][1])};
    }
    case EstimatorKind::joint_kappa: {
      const double vb = guarded([&] { return K_and_V2(t0, b0, se).V2[0][0]; });
      const double vt = guarded([&] { return K_and_V2(t0, b0, se).V2[1][1]; });
      return {std::sqrt(vb), std::sqrt(vt), std::fabs(p.alpha0()) * std::sqrt(vb)};
    }
    case EstimatorKind::alpha_hat: return {guarded([&] { return std::sqrt(alpha_hat_asvar(t0, b0, se)); })};
  }
  return {};
}

double residual_sd(std::span<const double> y, std::span<const double> a, const LambdaFit& f) {
  double s = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double e = y[t] - f.delta_hat - f.beta_hat * a[t];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

std::vector<double> plugin_sds(EstimatorKind k, const ModelParams& truth, double theta, double beta,
                               double sigma_eps, double sigma_u, std::size_t ncoord) {
  ModelParams q = truth;
  q.theta0 = theta;
  q.beta0 = beta;
  q.delta0 = truth.alpha0() * (1.0 - beta);
  q.sigma_eps = sigma_eps;
  q.sigma_u = sigma_u;
  try {
    return theory_sds(k, q);
  } catch (const std::exception&) {
    return std::vector<double>(ncoord, kNaN);
  }
}

struct RepContext {
  const ExperimentConfig& cfg;
  SimOptions sim;
};

std::vector<CellEstimate> run_replication(const RepContext& ctx, std::size_t n, std::size_t rep) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ModelParams& p = cfg.params;
  const SimPath path = simulate_path(p, n, NoiseSource{cfg.master_seed, rep}, ctx.sim);
  const ThetaBounds bounds = p.bounds();
  const bool plugin = cfg.ci_policy == CiPolicy::plugin;

  std::vector<CellEstimate> out(cfg.estimators.size());
  const auto want = [&](EstimatorKind k) {
    return std::find(cfg.estimators.begin(), cfg.estimators.end(), k) != cfg.estimators.end();
  };

  double a_start = path.z[0];
  if (cfg.a_start_policy == AStartPolicy::zero) a_start = 0.0;
  if (cfg.a_start_policy == AStartPolicy::custom) a_start = cfg.a_start_value;

  std::optional<ThetaFit> tfit;
  std::optional<LambdaFit> lfit;
  std::vector<double> feasible_path;
  if (want(EstimatorKind::nls_theta) || want(EstimatorKind::two_step)) {
    try {
      tfit = nls_theta(path.z, path.y, bounds, a_start, {cfg.theta_grid_size, cfg.tol_theta});
      feasible_path = filter_candidate(tfit->theta_hat, a_start, path.y, bounds);
      lfit = ols_lambda(path.y, feasible_path);
    } catch (const EstimationError&) {
    }
  }
  const bool theta_ok = tfit && (cfg.include_boundary || !tfit->at_boundary);

  for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
    const EstimatorKind k = cfg.estimators[e];
    CellEstimate& c = out[e];
    const std::size_t nc = coordinates(k).size();
    switch (k) {
      case EstimatorKind::nls_theta:
        if (theta_ok) {
          c.ok = true;
          c.value = {tfit->theta_hat};
          if (plugin) {
            const double sig_u = std::sqrt(tfit->q_min / static_cast<double>(n));
            const double beta = lfit ? lfit->beta_hat : p.beta0;
            const double sig_e = lfit ? residual_sd(path.y, feasible_path, *lfit) : p.sigma_eps;
            c.plugin_sd = plugin_sds(k, p, tfit->theta_hat, beta, sig_e, sig_u, nc);
          }
        }
        break;
      case EstimatorKind::two_step:
        if (theta_ok && lfit) {
          c.ok = true;
          c.value = {lfit->delta_hat, lfit->beta_hat};
          if (plugin) {
            const double sig_u = std::sqrt(tfit->q_min / static_cast<double>(n));
            c.plugin_sd = plugin_sds(k, p, tfit->theta_hat, lfit->beta_hat,
                                     residual_sd(path.y, feasible_path, *lfit), sig_u, nc);
          }
        }
        break;
      case EstimatorKind::infeasible_ols:
        try {
          const LambdaFit f = ols_lambda(path.y, path.a);
          c.ok = true;
          c.value = {f.delta_hat, f.beta_hat};
          if (plugin) {
            c.plugin_sd = plugin_sds(k, p, p.theta0, f.beta_hat, residual_sd(path.y, path.a, f), p.sigma_u, nc);
          }
        } catch (const EstimationError&) {
        }
        break;
      case EstimatorKind::joint_kappa:
        try {
          const double alpha = cfg.alpha_policy == AlphaPolicy::true_alpha ? p.alpha0() : alpha_hat(path.y);
          const KappaFit f = joint_kappa(path.y, alpha, bounds,
                                         {cfg.theta_grid_size, cfg.tol_theta, cfg.beta_lo, cfg.beta_hi});
          if (cfg.include_boundary || !(f.theta_at_boundary || f.beta_at_boundary)) {
            c.ok = true;
            c.value = {f.beta_hat, f.theta_hat, f.delta_hat_implied};
            if (plugin) {
              const double sig_e = std::sqrt(f.q_min / static_cast<double>(n));
              c.plugin_sd = plugin_sds(k, p, f.theta_hat, f.beta_hat, sig_e, p.sigma_u, nc);
            }
          }
        } catch (const EstimationError&) {
        }
        break;
      case EstimatorKind::alpha_hat:
        c.ok = true;
        c.value = {alpha_hat(path.y)};
        if (plugin) c.plugin_sd = theory_sds(k, p);
        break;
    }
  }
  return out;
}

SimOptions sim_options(const ExperimentConfig& cfg) {
  SimOptions s;
  s.a_init_sd = cfg.a_init_sd;
  if (cfg.noise == NoiseKind::student_t) {
    s.eps_sampler = student_t_sampler(cfg.noise_dof);
    s.u_sampler = student_t_sampler(cfg.noise_dof);
  }
  return s;
}

std::vector<std::vector<CellEstimate>> run_cell_reps(const ExperimentConfig& cfg, std::size_t n) {
  return parallel_map<std::vector<CellEstimate>>(cfg.reps, cfg.threads, [&](std::size_t r) {
    // Samplers carry distribution state, so each task builds its own.
    const RepContext ctx{cfg, sim_options(cfg)};
    return run_replication(ctx, n, r);
  });
}

}  // namespace

const char* estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::nls_theta: return "nls_theta";
    case EstimatorKind::two_step: return "two_step";
    case EstimatorKind::infeasible_ols: return "infeasible_ols";
    case EstimatorKind::joint_kappa: return "joint_kappa";
    case EstimatorKind::alpha_hat: return "alpha_hat";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  params.validate();
  if (reps < 1) throw ConfigError("experiment.reps must be >= 1");
  if (n_values.empty()) throw ConfigError("experiment.n_values must be nonempty");
  std::set<std::size_t> seen;
  for (std::size_t n : n_values) {
    if (n < 3) throw ConfigError("experiment.n_values entries must be >= 3");
    if (!seen.insert(n).second) throw ConfigError("experiment.n_values entries must be distinct");
  }
  if (estimators.empty()) throw ConfigError("experiment.estimators must be nonempty");
  if (theta_grid_size < 3) throw ConfigError("estimator.theta_grid_size must be >= 3");
  if (!(tol_theta > 0.0)) throw ConfigError("estimator.tol_theta must be positive");
  if (!(beta_lo < beta_hi) || !(beta_hi < 1.0)) throw ConfigError("estimator beta bounds must satisfy lo < hi < 1");
  if (a_init_sd < 0.0) throw ConfigError("params.a_init_sd must be >= 0");
  if (noise == NoiseKind::student_t && !(noise_dof > 4.0)) throw ConfigError("noise.dof must exceed 4");
  if (threads < 1) throw ConfigError("experiment.threads must be >= 1");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    ModelParams& p = cfg.params;

    if (key == "params.theta0") p.theta0 = parse_double(key, v);
    else if (key == "params.beta0") p.beta0 = parse_double(key, v);
    else if (key == "params.delta0") p.delta0 = parse_double(key, v);
    else if (key == "params.sigma_eps") p.sigma_eps = parse_double(key, v);
    else if (key == "params.sigma_u") p.sigma_u = parse_double(key, v);
    else if (key == "params.a_init") p.a_init = parse_double(key, v);
    else if (key == "params.theta_lo") p.theta_lo = parse_double(key, v);
    else if (key == "params.theta_hi") p.theta_hi = parse_double(key, v);
    else if (key == "params.a_init_sd") cfg.a_init_sd = parse_double(key, v);
    else if (key == "noise.distribution") {
      if (v == "gaussian") cfg.noise = NoiseKind::gaussian;
      else if (v == "student_t") cfg.noise = NoiseKind::student_t;
      else throw ConfigError(key + ": expected gaussian or student_t");
    } else if (key == "noise.dof") cfg.noise_dof = parse_double(key, v);
    else if (key == "experiment.n_values") {
      cfg.n_values.clear();
      for (const auto& s : split(v, ',')) cfg.n_values.push_back(static_cast<std::size_t>(parse_u64(key, s)));
    } else if (key == "experiment.reps") cfg.reps = static_cast<std::size_t>(parse_u64(key, v));
    else if (key == "experiment.master_seed") cfg.master_seed = parse_u64(key, v);
    else if (key == "experiment.threads") cfg.threads = static_cast<unsigned>(parse_u64(key, v));
    else if (key == "experiment.estimators") {
      cfg.estimators.clear();
      for (const auto& s : split(v, ',')) cfg.estimators.push_back(parse_estimator(s));
    } else if (key == "estimator.theta_grid_size") cfg.theta_grid_size = static_cast<int>(parse_u64(key, v));
    else if (key == "estimator.tol_theta") cfg.tol_theta = parse_double(key, v);
    else if (key == "estimator.a_start_policy") {
      if (v == "z1") cfg.a_start_policy = AStartPolicy::z1;
      else if (v == "zero") cfg.a_start_policy = AStartPolicy::zero;
      else if (v == "custom") cfg.a_start_policy = AStartPolicy::custom;
      else throw ConfigError(key + ": expected z1, zero or custom");
    } else if (key == "estimator.a_start_value") cfg.a_start_value = parse_double(key, v);
    else if (key == "estimator.alpha_policy") {
      if (v == "true_alpha") cfg.alpha_policy = AlphaPolicy::true_alpha;
      else if (v == "sample_mean") cfg.alpha_policy = AlphaPolicy::sample_mean;
      else throw ConfigError(key + ": expected true_alpha or sample_mean");
    } else if (key == "estimator.beta_lo") cfg.beta_lo = parse_double(key, v);
    else if (key == "estimator.beta_hi") cfg.beta_hi = parse_double(key, v);
    else if (key == "report.include_boundary") cfg.include_boundary = parse_bool(key, v);
    else if (key == "report.ci_policy") {
      if (v == "oracle") cfg.ci_policy = CiPolicy::oracle;
      else if (v == "plugin") cfg.ci_policy = CiPolicy::plugin;
      else throw ConfigError(key + ": expected oracle or plugin");
    } else if (key == "output.path") cfg.output_path = v;
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open configuration file");
  return parse_config(in, std::move(base));
}

bool McRow::operator==(const McRow& o) const {
  return n == o.n && estimator == o.estimator && coordinate == o.coordinate && nan_eq(mean, o.mean) &&
         nan_eq(bias, o.bias) && nan_eq(sd, o.sd) && nan_eq(scaled_sd, o.scaled_sd) &&
         nan_eq(theory_sd, o.theory_sd) && nan_eq(ratio, o.ratio) && nan_eq(coverage_95, o.coverage_95) &&
         reps_used == o.reps_used && failures == o.failures;
}

const McRow* McReport::find(std::size_t n, const std::string& estimator, const std::string& coordinate) const {
  for (const auto& r : rows)
    if (r.n == n && r.estimator == estimator && r.coordinate == coordinate) return &r;
  return nullptr;
}

McReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> ns = cfg.n_values;
  std::sort(ns.begin(), ns.end());

  McReport report;
  bool any_used = false;
  for (std::size_t n : ns) {
    const auto reps = run_cell_reps(cfg, n);
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      const EstimatorKind k = cfg.estimators[e];
      const auto coords = coordinates(k);
      const auto truth = truths(k, cfg.params);
      const auto theory = theory_sds(k, cfg.params);
      const double scale = std::sqrt(scale_of(k, n));
      for (std::size_t c = 0; c < coords.size(); ++c) {
        McRow row;
        row.n = n;
        row.estimator = estimator_name(k);
        row.coordinate = coords[c];
        std::vector<double> vals;
        std::size_t covered = 0, ci_count = 0;
        for (const auto& rep : reps) {
          const CellEstimate& ce = rep[e];
          if (!ce.ok) {
            ++row.failures;
            continue;
          }
          const double v = ce.value[c];
          vals.push_back(v);
          const double sd = cfg.ci_policy == CiPolicy::plugin ? ce.plugin_sd[c] : theory[c];
          if (std::isfinite(sd)) {
            ++ci_count;
            if (std::fabs(v - truth[c]) * scale <= kZ95 * sd) ++covered;
          }
        }
        row.reps_used = vals.size();
        if (!vals.empty()) any_used = true;
        double mean = kNaN, sd = kNaN;
        if (!vals.empty()) {
          double s = 0.0;
          for (double v : vals) s += v;
          mean = s / static_cast<double>(vals.size());
        }
        if (vals.size() >= 2) {
          double s = 0.0;
          for (double v : vals) s += (v - mean) * (v - mean);
          sd = std::sqrt(s / static_cast<double>(vals.size() - 1));
        }
        row.mean = mean;
        row.bias = mean - truth[c];
        row.sd = sd;
        row.scaled_sd = sd * scale;
        row.theory_sd = theory[c];
        row.ratio = row.scaled_sd / row.theory_sd;
        row.coverage_95 = ci_count > 0 ? static_cast<double>(covered) / static_cast<double>(ci_count) : kNaN;
        report.rows.push_back(row);
      }
    }
  }
  if (!any_used) throw EstimationError("run_experiment: all replications failed");
  return report;
}

std::vector<double> replicate_estimates(const ExperimentConfig& cfg, std::size_t n, EstimatorKind kind,
                                        const std::string& coordinate) {
  ExperimentConfig one = cfg;
  one.estimators = {kind};
  one.n_values = {n};
  one.validate();
  const auto coords = coordinates(kind);
  const auto it = std::find(coords.begin(), coords.end(), coordinate);
  if (it == coords.end()) throw ConfigError("unknown coordinate '" + coordinate + "'");
  const auto c = static_cast<std::size_t>(it - coords.begin());
  const auto reps = run_cell_reps(one, n);
  std::vector<double> out;
  out.reserve(reps.size());
  for (const auto& rep : reps) out.push_back(rep[0].ok ? rep[0].value[c] : kNaN);
  return out;
}

void write_report_csv(const McReport& report, std::ostream& out) {
  out << "n,estimator,coordinate,mean,bias,sd,scaled_sd,theory_sd,ratio,coverage_95,reps_used,failures\n";
  for (const auto& r : report.rows) {
    out << r.n << ',' << r.estimator << ',' << r.coordinate << ',' << fmt17(r.mean) << ',' << fmt17(r.bias) << ','
        << fmt17(r.sd) << ',' << fmt17(r.scaled_sd) << ',' << fmt17(r.theory_sd) << ',' << fmt17(r.ratio) << ','
        << fmt17(r.coverage_95) << ',' << r.reps_used << ',' << r.failures << '\n';
  }
}

McReport read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("report", "missing header row");
  if (trim(line) != "n,estimator,coordinate,mean,bias,sd,scaled_sd,theory_sd,ratio,coverage_95,reps_used,failures") {
    throw IoError("report", "unexpected header row");
  }
  McReport rep;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 12) throw IoError("report", "expected 12 fields, got " + std::to_string(f.size()));
    McRow r;
    try {
      r.n = static_cast<std::size_t>(parse_u64("n", f[0]));
      r.estimator = f[1];
      r.coordinate = f[2];
      r.mean = parse_double("mean", f[3]);
      r.bias = parse_double("bias", f[4]);
      r.sd = parse_double("sd", f[5]);
      r.scaled_sd = parse_double("scaled_sd", f[6]);
      r.theory_sd = parse_double("theory_sd", f[7]);
      r.ratio = parse_double("ratio", f[8]);
      r.coverage_95 = parse_double("coverage_95", f[9]);
      r.reps_used = static_cast<std::size_t>(parse_u64("reps_used", f[10]));
      r.failures = static_cast<std::size_t>(parse_u64("failures", f[11]));
    } catch (const ConfigError& e) {
      throw IoError("report", e.what());
    }
    rep.rows.push_back(r);
  }
  return rep;
}

void emit_csv(const McReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  write_report_csv(report, out);
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

McReport parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  try {
    return read_report_csv(in);
  } catch (const IoError& e) {
    throw IoError(path, e.what());
  }
}

void write_path_csv(const SimPath& path, std::ostream& out) {
  out << "t,eps,u,a,y,z\n";
  out << "0,nan,nan," << fmt17(path.a[0]) << ",nan,nan\n";
  for (std::size_t t = 1; t <= path.n(); ++t) {
    out << t << ',' << fmt17(path.eps[t - 1]) << ',' << fmt17(path.u[t - 1]) << ',' << fmt17(path.a[t]) << ','
        << fmt17(path.y[t - 1]) << ',' << fmt17(path.z[t - 1]) << '\n';
  }
}

YzData read_yz_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("input", "empty file");
  const auto header = split(line, ',');
  const auto col = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IoError("input", std::string("missing column '") + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t iy = col("y"), iz = col("z");
  YzData d;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) throw IoError("input", "line " + std::to_string(lineno) + ": wrong field count");
    double y = 0.0, z = 0.0;
    try {
      y = parse_double("y", f[iy]);
      z = parse_double("z", f[iz]);
    } catch (const ConfigError& e) {
      throw IoError("input", "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!std::isfinite(y) || !std::isfinite(z)) continue;
    d.y.push_back(y);
    d.z.push_back(z);
  }
  return d;
}

namespace {

void line(std::ostream& out, const char* name, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%-24s %.10g\n", name, v);
  out << buf;
}

void line2(std::ostream& out, const char* name, const Mat2& m) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s [[%.10g, %.10g], [%.10g, %.10g]]\n", name, m[0][0], m[0][1], m[1][0],
                m[1][1]);
  out << buf;
}

}  // namespace

void print_limits(const ModelParams& params, std::ostream& out) {
  const LimitValues v = compute_limits(params);
  line(out, "theta0", params.theta0);
  line(out, "beta0", params.beta0);
  line(out, "delta0", params.delta0);
  line(out, "sigma_eps", params.sigma_eps);
  line(out, "sigma_u", params.sigma_u);
  line(out, "alpha0", v.alpha0);
  line(out, "c0", v.c0);
  line(out, "sigma_a_sq", v.sigma_a_sq);
  line(out, "sigma_adot_sq", v.sigma_adot_sq);
  line(out, "sigma_a_adot", v.sigma_a_adot);
  line(out, "theta_asvar", v.theta_asvar);
  line(out, "B", v.B);
  line(out, "sqrt_1_plus_B", std::sqrt(1.0 + v.B));
  line2(out, "V0", v.V0);
  line2(out, "lambda_cov", v.lambda_cov);
  if (v.joint) {
    line2(out, "K", v.joint->K);
    line2(out, "V2", v.joint->V2);
    line(out, "kappa_theta_var", v.joint->kappa_theta_var);
  } else {
    out << "K, V2                    not identified (beta0 = 0)\n";
  }
  if (v.alpha_hat_asvar) line(out, "alpha_hat_asvar", *v.alpha_hat_asvar);
}

void print_estimates(const EstimateSet& est, std::ostream& out) {
  line(out, "theta_hat", est.theta.theta_hat);
  line(out, "q_min", est.theta.q_min);
  out << "at_boundary              " << (est.theta.at_boundary ? "true" : "false") << '\n';
  line(out, "delta_hat", est.lambda.delta_hat);
  line(out, "beta_hat", est.lambda.beta_hat);
  line(out, "det_gram", est.lambda.det_gram);
  if (est.lambda_infeasible) {
    line(out, "delta_hat_infeasible", est.lambda_infeasible->delta_hat);
    line(out, "beta_hat_infeasible", est.lambda_infeasible->beta_hat);
  }
  line(out, "alpha_hat", est.alpha_hat);
  line(out, "kappa_beta", est.kappa.beta_hat);
  line(out, "kappa_theta", est.kappa.theta_hat);
  line(out, "kappa_delta", est.kappa.delta_hat_implied);
  out << "kappa_at_boundary        "
      << ((est.kappa.theta_at_boundary || est.kappa.beta_at_boundary) ? "true" : "false") << '\n';
}

std::vector<LemmaCheckResult> run_lemma_suite(const ModelParams& params, const LemmaSuiteOptions& opts) {
  params.validate();
  std::vector<LemmaCheckResult> out;
  for (const A5Query& q : default_a5_queries(opts.theta, params.theta0, params.beta0)) {
    out.push_back(check_a5(q, opts.n_values));
  }

  const auto& mcn = opts.mc_n_values;
  std::vector<A2McResult> a2;
  for (Index n : mcn) a2.push_back(lemma_a2_mc(opts.theta, params, n, opts.reps, opts.seed, opts.threads));
  for (int k = 0; k < 4; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    LemmaCheckResult mc, ex;
    mc.lemma_id = a2_item_name(static_cast<A2Item>(k));
    ex.lemma_id = mc.lemma_id + "_exact";
    mc.limit_value = ex.limit_value = a2.front().limit[ku];
    bool ex_decreasing = true;
    for (std::size_t j = 0; j < mcn.size(); ++j) {
      mc.n_values.push_back(mcn[j]);
      ex.n_values.push_back(mcn[j]);
      mc.finite_n_values.push_back(a2[j].mean[ku]);
      ex.finite_n_values.push_back(a2[j].exact[ku]);
      mc.abs_errors.push_back(std::fabs(a2[j].mean[ku] - mc.limit_value));
      const double ee = std::fabs(a2[j].exact[ku] - ex.limit_value);
      if (!ex.abs_errors.empty() && !(ee < ex.abs_errors.back())) ex_decreasing = false;
      ex.abs_errors.push_back(ee);
    }
    mc.passed = mc.abs_errors.back() <= 3.0 * a2.back().se[ku];
    ex.passed = ex_decreasing;
    out.push_back(mc);
    out.push_back(ex);
  }

  for (int m = 1; m <= 2; ++m) {
    const RateResult rr = lemma_a3_rate(m, 2, params, mcn, opts.reps, opts.seed, opts.threads);
    LemmaCheckResult r;
    r.lemma_id = "A3_m" + std::to_string(m);
    r.n_values = rr.n_values;
    r.finite_n_values = rr.moment_root;
    r.limit_value = -0.5;
    r.abs_errors.assign(rr.n_values.size(), std::fabs(rr.slope + 0.5));
    r.passed = std::fabs(rr.slope + 0.5) <= (m == 1 ? 0.1 : 0.15);
    out.push_back(r);
  }

  {
    const double th[] = {params.theta_lo, 0.5 * (params.theta_lo + params.theta0), params.theta0,
                         0.5 * (params.theta0 + params.theta_hi), params.theta_hi};
    const double ag[] = {params.a_init};
    const auto gaps = lemma_a4_gap(params, th, ag, mcn, opts.reps, opts.seed, opts.threads);
    LemmaCheckResult r;
    r.lemma_id = "A4";
    r.n_values = mcn;
    r.finite_n_values = gaps;
    r.limit_value = kNaN;
    r.abs_errors.assign(gaps.size(), kNaN);
    r.passed = gaps.back() <= 1.1 * gaps.front();
    out.push_back(r);
  }

  {
    std::vector<double> th;
    for (int k = 0; k < 8; ++k) th.push_back(params.theta_lo + (params.theta_hi - params.theta_lo) * k / 7.0);
    const auto st = lemma_a1_bounds(1, params, mcn, th, opts.reps, opts.seed, opts.threads);
    const char* ids[] = {"A1_i", "A1_ii", "A1_iii"};
    for (int item = 0; item < 3; ++item) {
      LemmaCheckResult r;
      r.lemma_id = ids[item];
      r.n_values = mcn;
      for (const auto& s : st) r.finite_n_values.push_back(item == 0 ? s.sum_sq : item == 1 ? s.sum_sq_v2 : s.abs_sum_v);
      r.limit_value = kNaN;
      r.abs_errors.assign(st.size(), kNaN);
      const auto [lo, hi] = std::minmax_element(r.finite_n_values.begin(), r.finite_n_values.end());
      r.passed = *lo > 0.0 && *hi / *lo < 2.0;
      out.push_back(r);
    }
  }
  return out;
}

void write_lemma_csv(const std::vector<LemmaCheckResult>& results, std::ostream& out) {
  out << "lemma_id,n,finite_n_value,limit_value,abs_error,passed\n";
  for (const auto& r : results) {
    for (std::size_t k = 0; k < r.n_values.size(); ++k) {
      out << r.lemma_id << ',' << r.n_values[k] << ',' << fmt17(r.finite_n_values[k]) << ',' << fmt17(r.limit_value)
          << ',' << fmt17(r.abs_errors[k]) << ',' << (r.passed ? "true" : "false") << '\n';
    }
  }
}

}  // namespace adlearn
