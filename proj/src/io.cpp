#include "sjde/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sjde {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  auto res = std::to_chars(buf, buf + 16, value, 16);
  std::string digits(buf, res.ptr);
  return std::string(16 - digits.size(), '0') + digits;
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_double(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

std::string format_coefficients(const CoefficientsFile& file) {
  std::ostringstream out;
  out << "[coefficients]\n"
      << "scenario = " << file.scenario << "\n"
      << "hypotheses = " << file.coeffs.hypothesis_count() << "\n"
      << "lambda_det = " << join_doubles(file.coeffs.lambda_det) << "\n"
      << "lambda_est = " << join_doubles(file.coeffs.lambda_est) << "\n"
      << "\n[provenance]\n"
      << "config_hash = " << hex64(file.provenance.config_hash) << "\n"
      << "seed = " << file.provenance.seed << "\n"
      << "iterations = " << file.iterations << "\n"
      << "converged = " << (file.converged ? "true" : "false") << "\n"
      << "alpha_hat = " << join_doubles(file.alpha_hat) << "\n"
      << "beta_hat = " << join_doubles(file.beta_hat) << "\n"
      << "version = " << file.provenance.version << "\n";
  return out.str();
}

CoefficientsFile parse_coefficients(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("coefficients file: ") + e.message());
  }
  auto get = [&](const char* key) {
    auto v = tree.get_optional<std::string>(key);
    if (!v) throw ConfigError(std::string("coefficients file: missing ") + key);
    return *v;
  };
  CoefficientsFile file;
  file.scenario = get("coefficients.scenario");
  file.coeffs.lambda_det = parse_double_list(get("coefficients.lambda_det"));
  file.coeffs.lambda_est = parse_double_list(get("coefficients.lambda_est"));
  const std::string hyps = get("coefficients.hypotheses");
  if (std::to_string(file.coeffs.lambda_det.size()) != hyps) {
    throw ConfigError("coefficients file: hypotheses does not match lambda_det");
  }
  file.coeffs.validate();
  if (auto h = tree.get_optional<std::string>("provenance.config_hash")) {
    std::uint64_t v = 0;
    std::from_chars(h->data(), h->data() + h->size(), v, 16);
    file.provenance.config_hash = v;
  }
  file.provenance.seed = tree.get<std::uint64_t>("provenance.seed", 0);
  file.iterations = tree.get<std::size_t>("provenance.iterations", 0);
  file.converged = tree.get<std::string>("provenance.converged", "false") == "true";
  if (auto a = tree.get_optional<std::string>("provenance.alpha_hat"); a && !a->empty()) {
    file.alpha_hat = parse_double_list(*a);
  }
  if (auto b = tree.get_optional<std::string>("provenance.beta_hat"); b && !b->empty()) {
    file.beta_hat = parse_double_list(*b);
  }
  file.provenance.version = tree.get<std::string>("provenance.version", "");
  return file;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_coefficients(const std::string& path, const CoefficientsFile& file) {
  write_file(path, format_coefficients(file));
}

CoefficientsFile read_coefficients(const std::string& path) {
  return parse_coefficients(read_file(path));
}

void write_provenance(std::ostream& out, const Provenance& provenance) {
  out << "# config_hash=" << hex64(provenance.config_hash) << "\n"
      << "# seed=" << provenance.seed << "\n"
      << "# version=" << provenance.version << "\n";
}

void write_errors_csv(std::ostream& out, const Provenance& provenance,
                      const std::vector<ErrorRow>& rows, const std::vector<double>& alpha_bar,
                      const std::vector<double>& beta_bar) {
  write_provenance(out, provenance);
  out << "policy,hypothesis,nominal_alpha,alpha_hat,alpha_se,nominal_beta,beta_hat,beta_se\n";
  for (const auto& row : rows) {
    const auto& e = *row.estimate;
    for (std::size_t m = 0; m < e.alpha_hat.size(); ++m) {
      out << row.policy << ',' << m + 1 << ',' << format_double(alpha_bar[m]) << ','
          << format_double(e.alpha_hat[m]) << ',' << format_double(e.alpha_se[m]) << ','
          << format_double(beta_bar[m]) << ',' << format_double(e.beta_hat[m]) << ','
          << format_double(e.beta_se[m]) << '\n';
    }
  }
}

void write_run_length_csv(std::ostream& out, const Provenance& provenance,
                          const std::vector<ErrorRow>& rows) {
  write_provenance(out, provenance);
  out << "policy,hypothesis,run_length,run_length_se\n";
  for (const auto& row : rows) {
    const auto& e = *row.estimate;
    for (std::size_t m = 0; m < e.rl.size(); ++m) {
      out << row.policy << ',' << m + 1 << ',' << format_double(e.rl[m]) << ','
          << format_double(e.rl_se[m]) << '\n';
    }
    out << row.policy << ",all," << format_double(e.rl_overall) << ','
        << format_double(e.rl_overall_se) << '\n';
  }
}

void write_policy_map_csv(std::ostream& out, const Provenance& provenance, const PolicyMap& map) {
  write_provenance(out, provenance);
  out << "n,xbar,action\n";
  const std::size_t cols = map.grid.xbar_count();
  for (std::size_t row = 0; row < map.rows(); ++row) {
    for (std::size_t j = 0; j < cols; ++j) {
      out << map.grid.n_min + row << ',' << format_double(map.grid.xbar(j)) << ','
          << action_name(map.at(row, j)) << '\n';
    }
  }
}

}  // namespace sjde
