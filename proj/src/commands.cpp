#include "sjde/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sjde/checks.hpp"
#include "sjde/config.hpp"
#include "sjde/io.hpp"
#include "sjde/simd/kernels.hpp"

namespace sjde {
namespace {

namespace fs = std::filesystem;

ExperimentConfig prepare(const CommandOptions& options) {
  if (options.config_path.empty()) throw ConfigError("--config is required");
  ExperimentConfig config = load_config(options.config_path);
  if (options.seed) {
    config.seed = *options.seed;
    config.simulation.master_seed = *options.seed;
  }
  if (options.runs) {
    if (*options.runs < 1) throw ConfigError("--runs must be at least 1");
    config.simulation.runs = *options.runs;
    config.design.runs_per_iter = *options.runs;
  }
  if (options.threads) {
    config.simulation.threads = *options.threads;
    config.design.threads = *options.threads;
  }
  config.validate();
  return config;
}

fs::path output_dir(const CommandOptions& options, const ExperimentConfig& config) {
  fs::path dir = options.out.value_or(config.output_dir);
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  return dir;
}

Provenance provenance_of(const ExperimentConfig& config) {
  return {config.config_hash, config.seed, std::string(kVersion)};
}

CostCoefficients load_coefficients(const CommandOptions& options, const ExperimentConfig& config) {
  if (!options.coeffs_path) throw ConfigError("--coeffs is required for this command");
  const CoefficientsFile file = read_coefficients(*options.coeffs_path);
  if (file.scenario != scenario_name(config.scenario)) {
    throw ConfigError("coefficients file is for scenario " + file.scenario);
  }
  if (file.coeffs.hypothesis_count() != config.hypotheses()) {
    throw ConfigError("coefficients file has the wrong number of hypotheses");
  }
  return file.coeffs;
}

SimulationConfig evaluation_sim(const ExperimentConfig& config) {
  SimulationConfig sim = config.simulation;
  sim.master_seed = derive_seed(config.seed, kEvaluateStream);
  return sim;
}

void print_estimate(std::ostream& out, const std::string& policy, const PerformanceEstimate& e,
                    const DesignConfig& levels) {
  out << policy << " (" << e.total_runs << " runs, " << e.capped_count << " capped)\n";
  out << "  H   alpha_bar  alpha_hat (se)        beta_bar   beta_hat (se)         E[tau|H] (se)\n";
  for (std::size_t m = 0; m < e.alpha_hat.size(); ++m) {
    out << "  " << std::setw(2) << m + 1 << std::fixed << std::setprecision(4) << "  "
        << std::setw(9) << levels.alpha_bar[m] << "  " << std::setw(8) << e.alpha_hat[m] << " ("
        << std::setw(6) << e.alpha_se[m] << ")  " << std::setw(9) << levels.beta_bar[m] << "  "
        << std::setw(8) << e.beta_hat[m] << " (" << std::setw(6) << e.beta_se[m] << ")  "
        << std::setprecision(2) << std::setw(8) << e.rl[m] << " (" << e.rl_se[m] << ")\n";
  }
  out << "  E[tau] = " << std::setprecision(3) << e.rl_overall << " (" << e.rl_overall_se
      << ")\n";
  out.unsetf(std::ios::floatfield);
}

template <class Model>
PerformanceEstimate run_evaluation(const Model& model, const std::string& policy,
                                   const ExperimentConfig& config,
                                   const CommandOptions& options) {
  const SimulationConfig sim = evaluation_sim(config);
  if (policy == "ao") return evaluate(model, AoPolicy{load_coefficients(options, config)}, sim);
  if (policy == "two_step") {
    return evaluate(model, TwoStepPolicy{thresholds_from_levels(config.design.alpha_bar, config.threshold_rule)}, sim);
  }
  throw ConfigError("--policy must be ao or two_step");
}

void write_text(const fs::path& path, const std::string& text) { write_file(path.string(), text); }

}  // namespace

int cmd_design(const CommandOptions& options, std::ostream& out, std::ostream& log) {
  const ExperimentConfig config = prepare(options);
  const fs::path dir = output_dir(options, config);
  std::ostringstream trace;
  write_provenance(trace, provenance_of(config));
  trace << "iteration,violation,coefficients,alpha_hat,beta_hat\n";
  const DesignResult result = with_model(config, [&](const auto& model) {
    return design(model, config.design, config.seed, [&](const DesignIteration& it) {
      log << "iteration " << it.k << ": max violation " << it.violation << "\n";
      trace << it.k << ',' << format_double(it.violation) << ",\"" << join_doubles(it.coefficients)
            << "\",\"" << join_doubles(it.alpha_hat) << "\",\"" << join_doubles(it.beta_hat)
            << "\"\n";
    });
  });
  CoefficientsFile file;
  file.scenario = std::string(scenario_name(config.scenario));
  file.coeffs = result.coeffs;
  file.provenance = provenance_of(config);
  file.iterations = result.iterations;
  file.converged = result.converged;
  file.alpha_hat = result.estimate.alpha_hat;
  file.beta_hat = result.estimate.beta_hat;
  const fs::path coeff_path = dir / "coefficients.ini";
  write_coefficients(coeff_path.string(), file);
  write_text(dir / "design_log.csv", trace.str());
  out << (result.converged ? "converged" : "did not converge") << " after " << result.iterations
      << " iterations; coefficients written to " << coeff_path.string() << "\n";
  if (result.cap_stopped) {
    out << "stopped early: iteration " << result.iterations
        << " hit the sample cap too often; best earlier iterate kept\n";
  }
  print_estimate(out, "ao", result.estimate, config.design);
  return result.converged ? kExitOk : kExitFailure;
}

int cmd_evaluate(const CommandOptions& options, std::ostream& out, std::ostream&) {
  const ExperimentConfig config = prepare(options);
  const fs::path dir = output_dir(options, config);
  const PerformanceEstimate est = with_model(config, [&](const auto& model) {
    return run_evaluation(model, options.policy, config, options);
  });
  const std::vector<ErrorRow> rows{{options.policy, &est}};
  std::ostringstream errors;
  write_errors_csv(errors, provenance_of(config), rows, config.design.alpha_bar,
                   config.design.beta_bar);
  write_text(dir / ("errors_" + options.policy + ".csv"), errors.str());
  std::ostringstream lengths;
  write_run_length_csv(lengths, provenance_of(config), rows);
  write_text(dir / ("run_lengths_" + options.policy + ".csv"), lengths.str());
  print_estimate(out, options.policy, est, config.design);
  if (est.cap_rate_exceeded()) {
    out << "cap-hit rate " << est.cap_rate() << " exceeds 1e-4\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_compare(const CommandOptions& options, std::ostream& out, std::ostream&) {
  const ExperimentConfig config = prepare(options);
  const fs::path dir = output_dir(options, config);
  const auto [ao, two] = with_model(config, [&](const auto& model) {
    return std::pair{run_evaluation(model, "ao", config, options),
                     run_evaluation(model, "two_step", config, options)};
  });
  const std::vector<ErrorRow> rows{{"ao", &ao}, {"two_step", &two}};
  std::ostringstream errors;
  write_errors_csv(errors, provenance_of(config), rows, config.design.alpha_bar,
                   config.design.beta_bar);
  write_text(dir / "compare_errors.csv", errors.str());
  std::ostringstream lengths;
  write_run_length_csv(lengths, provenance_of(config), rows);
  write_text(dir / "compare_run_lengths.csv", lengths.str());
  print_estimate(out, "ao", ao, config.design);
  print_estimate(out, "two_step", two, config.design);
  return ao.cap_rate_exceeded() || two.cap_rate_exceeded() ? kExitFailure : kExitOk;
}

int cmd_policy_map(const CommandOptions& options, std::ostream& out, std::ostream&) {
  const ExperimentConfig config = prepare(options);
  if (config.scenario != Scenario::shift_in_mean) {
    throw ConfigError("policy-map needs a scenario with a one-dimensional statistic");
  }
  const CostCoefficients coeffs = load_coefficients(options, config);
  const fs::path dir = output_dir(options, config);
  const ShiftInMean model(config.shift_in_mean, config.quadrature);
  const PolicyMap map = policy_map(model, coeffs, config.policy_map);
  std::ostringstream csv;
  write_policy_map_csv(csv, provenance_of(config), map);
  write_text(dir / "policy_map.csv", csv.str());
  const auto closure = corridor_closure(map);
  for (std::size_t c = 0; c < closure.size(); ++c) {
    out << "corridor H" << c + 1 << "/H" << c + 2 << " closed by n = " << closure[c] << "\n";
  }
  return kExitOk;
}

int cmd_diagnostics(const CommandOptions& options, std::ostream& out, std::ostream&) {
  const ExperimentConfig config = prepare(options);
  const CostCoefficients coeffs =
      options.coeffs_path ? load_coefficients(options, config) : config.design.initial_coefficients();
  out << "kernels: " << simd::isa_name(simd::kernels().isa) << "\n";
  with_model(config, [&](const auto& model) {
    const std::size_t hyps = model.hypothesis_count();
    std::vector<double> theta(hyps);
    for (std::size_t m = 0; m < hyps; ++m) theta[m] = model.prior_mean(m);
    out << "Fisher information at the prior means (and Tr I^-1):\n";
    for (std::size_t m = 0; m < hyps; ++m) {
      const double inv = model.fisher_info_trace_inv(m, theta[m]);
      out << "  H" << m + 1 << "  theta = " << theta[m] << "  I = " << 1.0 / inv
          << "  Tr I^-1 = " << inv << "\n";
    }
    out << "KL(p_m || p_k) at the prior means, both directions:\n";
    const std::size_t shown = std::min<std::size_t>(hyps, 4);
    for (std::size_t m = 0; m < shown; ++m) {
      for (std::size_t k = 0; k < shown; ++k) {
        if (m == k) continue;
        out << "  KL(" << m + 1 << "||" << k + 1
            << ") = " << model.kl_divergence(m, theta[m], k, theta[k]) << "   KL(" << k + 1
            << "||" << m + 1 << ") = " << model.kl_divergence(k, theta[k], m, theta[m]) << "\n";
      }
    }
    out << "Limit G = lambda_bar_est[m] Tr I^-1 for sampled theta:\n";
    Rng rng(derive_seed(config.seed, kCheckStream));
    for (std::size_t m = 0; m < shown; ++m) {
      const auto t = model.sample_param(m, rng);
      out << "  H" << m + 1 << "  theta = " << t
          << "  G = " << normalized_cost_limit(model, m, t, coeffs) << "\n";
    }
    const std::size_t checkpoints[] = {25, 50, 100, 200};
    const auto cons = consistency_check(model, 0, 50, checkpoints, config.seed);
    out << "consistency under H1: median p(H1|x) at n = 200 is " << cons.median_post_true
        << ", slope of log(1 - p) is " << cons.slope << "\n";
    out << "Bernstein-von-Mises: median |n Tr Sigma / Tr I^-1 - 1| at n = 2000 is "
        << bvm_median_deviation(model, 50, 2000, config.seed) << "\n";
    return 0;
  });
  return kExitOk;
}

int run_command(const std::string& name, const CommandOptions& options, std::ostream& out,
                std::ostream& log) {
  try {
    if (name == "design") return cmd_design(options, out, log);
    if (name == "evaluate") return cmd_evaluate(options, out, log);
    if (name == "compare") return cmd_compare(options, out, log);
    if (name == "policy-map") return cmd_policy_map(options, out, log);
    if (name == "diagnostics") return cmd_diagnostics(options, out, log);
    log << "unknown command: " << name << "\n";
    return kExitValidation;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericError& e) {
    log << "numeric failure: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sjde
