// Command-line front end: simulate, fit, mc, limits.
//
// Exit codes: 0 success, 1 usage error, 2 numerical or estimation failure,
// 3 I/O failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "adlearn/errors.hpp"
#include "adlearn/estimators.hpp"
#include "adlearn/harness.hpp"
#include "adlearn/kernels.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumeric = 2, kIo = 3 };

std::vector<std::size_t> parse_n_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw adlearn::ConfigError("--n: expected a comma-separated list of positive integers, got '" + s + "'");
    }
    out.push_back(static_cast<std::size_t>(std::stoull(item)));
  }
  if (out.empty()) throw adlearn::ConfigError("--n: empty list");
  return out;
}

// Writes through `fn` to `path`, or to stdout when path is empty.
template <class F>
void with_output(const std::string& path, F&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw adlearn::IoError(path, "cannot open for writing");
  fn(out);
  out.flush();
  if (!out) throw adlearn::IoError(path, "write failed");
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> reps;
  std::string n_list;
  std::optional<unsigned> threads;
};

adlearn::ExperimentConfig base_config(const Common& c) {
  adlearn::ExperimentConfig cfg;
  if (!c.config.empty()) cfg = adlearn::load_config(c.config);
  if (c.seed) cfg.master_seed = *c.seed;
  if (c.reps) cfg.reps = *c.reps;
  if (c.threads) cfg.threads = *c.threads;
  if (!c.n_list.empty()) cfg.n_values = parse_n_list(c.n_list);
  if (!c.out.empty()) cfg.output_path = c.out;
  return cfg;
}

void add_common(CLI::App* app, Common& c, bool with_reps) {
  app->add_option("--config", c.config, "Key-value configuration file");
  app->add_option("--seed", c.seed, "Master seed (unsigned 64-bit)");
  app->add_option("--out", c.out, "Output path (default: stdout)");
  app->add_option("--n", c.n_list, "Sample size, or comma-separated list");
  app->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  if (with_reps) app->add_option("--reps", c.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
}

int cmd_simulate(const Common& c, std::uint64_t stream) {
  adlearn::ExperimentConfig cfg = base_config(c);
  if (cfg.n_values.size() != 1) throw adlearn::ConfigError("simulate: --n must be a single sample size");
  cfg.params.validate();
  adlearn::SimOptions opts;
  opts.a_init_sd = cfg.a_init_sd;
  if (cfg.noise == adlearn::NoiseKind::student_t) {
    opts.eps_sampler = adlearn::student_t_sampler(cfg.noise_dof);
    opts.u_sampler = adlearn::student_t_sampler(cfg.noise_dof);
  }
  const adlearn::SimPath path =
      adlearn::simulate_path(cfg.params, cfg.n_values.front(), adlearn::NoiseSource{cfg.master_seed, stream}, opts);
  with_output(c.out, [&](std::ostream& os) { adlearn::write_path_csv(path, os); });
  return kOk;
}

int cmd_fit(const Common& c, const std::string& input) {
  const adlearn::ExperimentConfig cfg = base_config(c);
  cfg.params.validate();
  std::ifstream in(input);
  if (!in) throw adlearn::IoError(input, "cannot open for reading");
  adlearn::YzData data;
  try {
    data = adlearn::read_yz_csv(in);
  } catch (const adlearn::IoError& e) {
    throw adlearn::IoError(input, e.what());
  }
  adlearn::EstimateOptions opts;
  opts.two_step.nls = {cfg.theta_grid_size, cfg.tol_theta};
  if (cfg.a_start_policy == adlearn::AStartPolicy::zero) opts.two_step.a_start = 0.0;
  if (cfg.a_start_policy == adlearn::AStartPolicy::custom) opts.two_step.a_start = cfg.a_start_value;
  opts.kappa = {cfg.theta_grid_size, cfg.tol_theta, cfg.beta_lo, cfg.beta_hi};
  if (cfg.alpha_policy == adlearn::AlphaPolicy::true_alpha) opts.alpha = cfg.params.alpha0();
  const adlearn::EstimateSet est = adlearn::estimate_all(data.z, data.y, cfg.params.bounds(), opts);
  with_output(c.out, [&](std::ostream& os) {
    os << "n                        " << data.y.size() << '\n';
    adlearn::print_estimates(est, os);
  });
  return kOk;
}

int cmd_mc(const Common& c) {
  const adlearn::ExperimentConfig cfg = base_config(c);
  const adlearn::McReport rep = adlearn::run_experiment(cfg);
  if (cfg.output_path.empty()) {
    adlearn::write_report_csv(rep, std::cout);
  } else {
    adlearn::emit_csv(rep, cfg.output_path);
  }
  return kOk;
}

int cmd_limits(const Common& c, bool lemmas) {
  const adlearn::ExperimentConfig cfg = base_config(c);
  cfg.params.validate();
  adlearn::print_limits(cfg.params, std::cout);
  std::cout << "simd                     " << adlearn::kernels::isa_name(adlearn::kernels::active_isa()) << '\n';
  if (!lemmas) return kOk;
  adlearn::LemmaSuiteOptions lo;
  if (c.reps) lo.reps = *c.reps;
  if (c.seed) lo.seed = *c.seed;
  lo.threads = cfg.threads;
  if (!c.n_list.empty()) {
    lo.mc_n_values.clear();
    for (std::size_t n : cfg.n_values) lo.mc_n_values.push_back(static_cast<adlearn::Index>(n));
  }
  const auto results = adlearn::run_lemma_suite(cfg.params, lo);
  if (c.out.empty()) std::cout << '\n';
  with_output(c.out, [&](std::ostream& os) { adlearn::write_lemma_csv(results, os); });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation, estimation and verification for decreasing-gain adaptive learning models"};
  app.require_subcommand(1);

  Common sim_c, fit_c, mc_c, lim_c;
  std::uint64_t stream = 0;
  std::string input;
  bool no_lemmas = false;

  CLI::App* sim = app.add_subcommand("simulate", "Simulate one path and write it as CSV (t,eps,u,a,y,z)");
  add_common(sim, sim_c, false);
  sim->add_option("--stream", stream, "Replication stream id");

  CLI::App* fit = app.add_subcommand("fit", "Estimate from a CSV with y and z columns");
  add_common(fit, fit_c, false);
  fit->add_option("input", input, "Input CSV")->required();

  CLI::App* mc = app.add_subcommand("mc", "Run a Monte Carlo experiment and write the report CSV");
  add_common(mc, mc_c, true);

  CLI::App* lim = app.add_subcommand("limits", "Print limiting quantities and run the lemma checks");
  add_common(lim, lim_c, true);
  lim->add_flag("--no-lemmas", no_lemmas, "Only print the limit table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(sim_c, stream);
    if (*fit) return cmd_fit(fit_c, input);
    if (*mc) return cmd_mc(mc_c);
    if (*lim) return cmd_limits(lim_c, !no_lemmas);
  } catch (const adlearn::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const adlearn::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const adlearn::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const adlearn::DomainError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumeric;
  } catch (const adlearn::EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
