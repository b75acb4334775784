#include "sjde/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "sjde/io.hpp"

namespace sjde {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"scenario", "seed", "output_dir"}},
      {"shift_in_mean",
       {"sigma2", "gamma_shape", "gamma_scale", "offset", "uniform_lo", "uniform_hi", "priors"}},
      {"qam", {"igam_shape", "igam_scale", "constellation_scale", "priors"}},
      {"quadrature",
       {"node_count", "tail_mass_cut", "refinement_factor", "max_refinements", "rel_tol"}},
      {"levels", {"alpha_bar", "beta_bar"}},
      {"design",
       {"tol_det", "tol_est", "epsilon", "runs_per_iter", "max_iters", "step",
        "initial_lambda_det", "initial_lambda_est"}},
      {"simulation", {"runs", "n_max", "stratify", "threads"}},
      {"policy_map", {"n_min", "n_max", "xbar_min", "xbar_max", "xbar_step"}},
      {"msprt", {"threshold_rule"}},
  };
  return keys;
}

std::uint64_t parse_unsigned(const std::string& text) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw ConfigError("not a non-negative integer: '" + text + "'");
  }
  return value;
}

template <class F>
auto wrap(const std::string& sec, const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError("[" + sec + "] " + key + ": " + e.what());
  }
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  const pt::ptree* section(const std::string& name) const {
    auto it = tree_.find(name);
    return it == tree_.not_found() ? nullptr : &it->second;
  }

  std::optional<std::string> raw(const std::string& sec, const std::string& key) const {
    const auto* s = section(sec);
    if (!s) return std::nullopt;
    auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return *v;
  }

  void number(const std::string& sec, const std::string& key, double& out) const {
    if (auto v = raw(sec, key)) out = wrap(sec, key, [&] { return parse_double(*v); });
  }

  void count(const std::string& sec, const std::string& key, std::size_t& out) const {
    if (auto v = raw(sec, key)) out = wrap(sec, key, [&] { return parse_unsigned(*v); });
  }

  void seed(const std::string& sec, const std::string& key, std::uint64_t& out) const {
    if (auto v = raw(sec, key)) out = wrap(sec, key, [&] { return parse_unsigned(*v); });
  }

  void flag(const std::string& sec, const std::string& key, bool& out) const {
    if (auto v = raw(sec, key)) {
      if (*v == "true" || *v == "1") {
        out = true;
      } else if (*v == "false" || *v == "0") {
        out = false;
      } else {
        throw ConfigError(location(sec, key) + "expected true or false");
      }
    }
  }

  std::optional<std::vector<double>> list(const std::string& sec, const std::string& key) const {
    if (auto v = raw(sec, key)) return wrap(sec, key, [&] { return parse_double_list(*v); });
    return std::nullopt;
  }

  static std::string location(const std::string& sec, const std::string& key) {
    return "[" + sec + "] " + key + ": ";
  }

 private:
  const pt::ptree& tree_;
};

std::vector<double> broadcast(const std::vector<double>& values, std::size_t count,
                              const char* name) {
  if (values.size() == 1) return std::vector<double>(count, values[0]);
  if (values.size() != count) {
    throw ConfigError(std::string("[levels] ") + name + ": expected 1 or " +
                      std::to_string(count) + " values");
  }
  return values;
}

void rethrow_with(const std::string& prefix, const ConfigError& e) {
  throw ConfigError(prefix + e.what());
}

}  // namespace

std::string_view scenario_name(Scenario s) {
  return s == Scenario::shift_in_mean ? "shift_in_mean" : "qam";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "shift_in_mean") return Scenario::shift_in_mean;
  if (name == "qam") return Scenario::qam;
  throw ConfigError("[experiment] scenario: expected shift_in_mean or qam");
}

std::size_t ExperimentConfig::hypotheses() const {
  return scenario == Scenario::shift_in_mean ? 3 : qam.constellation.size();
}

void ExperimentConfig::validate() const {
  try {
    if (scenario == Scenario::shift_in_mean) {
      shift_in_mean.validate();
      quadrature.validate();
    } else {
      qam.validate();
    }
  } catch (const ConfigError& e) {
    rethrow_with("[" + std::string(scenario_name(scenario)) + "] ", e);
  }
  design.validate(hypotheses());
  try {
    simulation.validate();
  } catch (const ConfigError& e) {
    rethrow_with("[simulation] ", e);
  }
  try {
    policy_map.validate();
  } catch (const ConfigError& e) {
    rethrow_with("[policy_map] ", e);
  }
}

ExperimentConfig parse_config(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (body.empty()) throw ConfigError("config: key outside a section: " + section);
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw ConfigError("[" + section + "] " + key + ": unknown key");
      }
    }
  }

  const Reader r(tree);
  ExperimentConfig c;
  c.config_hash = fnv1a64(text);
  if (auto v = r.raw("experiment", "scenario")) c.scenario = parse_scenario(*v);
  r.seed("experiment", "seed", c.seed);
  if (auto v = r.raw("experiment", "output_dir")) c.output_dir = *v;

  auto& s = c.shift_in_mean;
  r.number("shift_in_mean", "sigma2", s.sigma2);
  r.number("shift_in_mean", "gamma_shape", s.gamma_shape);
  r.number("shift_in_mean", "gamma_scale", s.gamma_scale);
  r.number("shift_in_mean", "offset", s.offset);
  r.number("shift_in_mean", "uniform_lo", s.uniform_lo);
  r.number("shift_in_mean", "uniform_hi", s.uniform_hi);
  if (auto p = r.list("shift_in_mean", "priors")) {
    if (p->size() != 3) throw ConfigError("[shift_in_mean] priors: expected 3 values");
    std::copy(p->begin(), p->end(), s.priors.begin());
  }

  auto& q = c.quadrature;
  r.count("quadrature", "node_count", q.node_count);
  r.number("quadrature", "tail_mass_cut", q.tail_mass_cut);
  r.count("quadrature", "refinement_factor", q.refinement_factor);
  r.count("quadrature", "max_refinements", q.max_refinements);
  r.number("quadrature", "rel_tol", q.rel_tol);

  r.number("qam", "igam_shape", c.qam.igam_shape);
  r.number("qam", "igam_scale", c.qam.igam_scale);
  double constellation_scale = 1.0 / std::sqrt(10.0);
  r.number("qam", "constellation_scale", constellation_scale);
  if (!(constellation_scale > 0.0)) {
    throw ConfigError("[qam] constellation_scale: must be positive");
  }
  c.qam.constellation = square_qam16(constellation_scale);
  if (auto p = r.list("qam", "priors")) c.qam.priors = *p;

  const std::size_t hyps = c.hypotheses();
  auto& d = c.design;
  d.alpha_bar = broadcast(r.list("levels", "alpha_bar").value_or(std::vector<double>{0.05}), hyps,
                          "alpha_bar");
  d.beta_bar = broadcast(r.list("levels", "beta_bar").value_or(std::vector<double>{0.1}), hyps,
                         "beta_bar");
  r.number("design", "tol_det", d.tol_det);
  r.number("design", "tol_est", d.tol_est);
  r.number("design", "epsilon", d.epsilon);
  r.count("design", "runs_per_iter", d.runs_per_iter);
  r.count("design", "max_iters", d.max_iters);
  r.number("design", "step", d.step);
  const auto init_det = r.list("design", "initial_lambda_det");
  const auto init_est = r.list("design", "initial_lambda_est");
  if (init_det.has_value() != init_est.has_value()) {
    throw ConfigError("[design] initial_lambda_det and initial_lambda_est must be given together");
  }
  if (init_det) d.initial = CostCoefficients(*init_det, *init_est);

  auto& sim = c.simulation;
  r.count("simulation", "runs", sim.runs);
  r.count("simulation", "n_max", sim.n_max);
  r.flag("simulation", "stratify", sim.stratify);
  r.count("simulation", "threads", sim.threads);
  sim.master_seed = c.seed;
  d.n_max = sim.n_max;
  d.stratify = sim.stratify;
  d.threads = sim.threads;

  auto& g = c.policy_map;
  r.count("policy_map", "n_min", g.n_min);
  r.count("policy_map", "n_max", g.n_max);
  r.number("policy_map", "xbar_min", g.xbar_min);
  r.number("policy_map", "xbar_max", g.xbar_max);
  r.number("policy_map", "xbar_step", g.xbar_step);

  if (auto v = r.raw("msprt", "threshold_rule")) {
    c.threshold_rule = wrap("msprt", "threshold_rule", [&] { return parse_threshold_rule(*v); });
  }

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

}  // namespace sjde
