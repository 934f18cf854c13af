#pragma once

// Monte Carlo experiments over replicated simulated paths, CSV input/output,
// and the formatted tables printed by the command-line tool.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adlearn/estimators.hpp"
#include "adlearn/lemma_oracles.hpp"
#include "adlearn/model.hpp"

namespace adlearn {

enum class EstimatorKind { nls_theta, two_step, infeasible_ols, joint_kappa, alpha_hat };
enum class AStartPolicy { z1, zero, custom };
enum class AlphaPolicy { true_alpha, sample_mean };
enum class CiPolicy { oracle, plugin };
enum class NoiseKind { gaussian, student_t };

const char* estimator_name(EstimatorKind k);

struct ExperimentConfig {
  ModelParams params;
  double a_init_sd = 0.0;
  NoiseKind noise = NoiseKind::gaussian;
  double noise_dof = 8.0;
  std::vector<std::size_t> n_values{1000, 10000};
  std::size_t reps = 200;
  std::uint64_t master_seed = 20240101;
  std::vector<EstimatorKind> estimators{EstimatorKind::nls_theta, EstimatorKind::two_step,
                                        EstimatorKind::infeasible_ols};
  int theta_grid_size = 64;
  double tol_theta = 1e-7;
  AStartPolicy a_start_policy = AStartPolicy::z1;
  double a_start_value = 0.0;
  AlphaPolicy alpha_policy = AlphaPolicy::sample_mean;
  double beta_lo = -0.95;
  double beta_hi = 0.95;
  bool include_boundary = false;
  CiPolicy ci_policy = CiPolicy::oracle;
  unsigned threads = 1;
  std::string output_path;

  // Throws ConfigError on violated invariants (and ParameterError for params).
  void validate() const;
};

// Flat "dotted.key = value" text; '#' starts a comment. Unknown keys and
// malformed values raise ConfigError.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

struct McRow {
  std::size_t n = 0;
  std::string estimator;
  std::string coordinate;
  double mean = 0.0;
  double bias = 0.0;
  double sd = 0.0;
  double scaled_sd = 0.0;
  double theory_sd = 0.0;
  double ratio = 0.0;
  double coverage_95 = 0.0;
  std::size_t reps_used = 0;
  std::size_t failures = 0;

  bool operator==(const McRow& o) const;
};

struct McReport {
  std::vector<McRow> rows;

  const McRow* find(std::size_t n, const std::string& estimator, const std::string& coordinate) const;
  bool operator==(const McReport& o) const { return rows == o.rows; }
};

// Replication r at every n uses NoiseSource{master_seed, r}. Failed
// replications (estimation errors, boundary hits unless include_boundary) are
// counted per (n, estimator) and excluded from the moments.
McReport run_experiment(const ExperimentConfig& cfg);

// Raw per-replication estimates of one cell, before aggregation; NaN marks a
// failed replication. Used by the acceptance checks that need medians.
std::vector<double> replicate_estimates(const ExperimentConfig& cfg, std::size_t n, EstimatorKind kind,
                                        const std::string& coordinate);

void write_report_csv(const McReport& report, std::ostream& out);
McReport read_report_csv(std::istream& in);
void emit_csv(const McReport& report, const std::string& path);
McReport parse_csv(const std::string& path);

// Path CSV with header t,eps,u,a,y,z and a t = 0 row carrying a_0 only.
void write_path_csv(const SimPath& path, std::ostream& out);
struct YzData {
  std::vector<double> y;
  std::vector<double> z;
};
// Reads columns named y and z; rows where either is not finite are skipped.
YzData read_yz_csv(std::istream& in);

void print_limits(const ModelParams& params, std::ostream& out);
void print_estimates(const EstimateSet& est, std::ostream& out);

struct LemmaSuiteOptions {
  std::vector<Index> n_values{1000, 10000, 100000};
  std::vector<Index> mc_n_values{1000, 10000};
  std::size_t reps = 100;
  std::uint64_t seed = 7;
  unsigned threads = 1;
  double theta = 1.6;
};

std::vector<LemmaCheckResult> run_lemma_suite(const ModelParams& params, const LemmaSuiteOptions& opts);
void write_lemma_csv(const std::vector<LemmaCheckResult>& results, std::ostream& out);

}  // namespace adlearn
