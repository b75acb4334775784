#pragma once
// Coefficients files and CSV reports.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sjde/montecarlo.hpp"
#include "sjde/policy_map.hpp"

namespace sjde {

inline constexpr std::string_view kVersion = "0.1.0";

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Shortest representation that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);
std::string join_doubles(const std::vector<double>& values);

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version{kVersion};
};

struct CoefficientsFile {
  std::string scenario;
  CostCoefficients coeffs;
  Provenance provenance;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> alpha_hat;
  std::vector<double> beta_hat;
};

std::string format_coefficients(const CoefficientsFile& file);
CoefficientsFile parse_coefficients(std::string_view text);
void write_coefficients(const std::string& path, const CoefficientsFile& file);
CoefficientsFile read_coefficients(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

void write_provenance(std::ostream& out, const Provenance& provenance);

struct ErrorRow {
  std::string policy;
  const PerformanceEstimate* estimate;
};

// policy,hypothesis,nominal_alpha,alpha_hat,alpha_se,nominal_beta,beta_hat,beta_se
void write_errors_csv(std::ostream& out, const Provenance& provenance,
                      const std::vector<ErrorRow>& rows, const std::vector<double>& alpha_bar,
                      const std::vector<double>& beta_bar);

// policy,hypothesis,run_length,run_length_se with an "all" row per policy.
void write_run_length_csv(std::ostream& out, const Provenance& provenance,
                          const std::vector<ErrorRow>& rows);

// n,xbar,action
void write_policy_map_csv(std::ostream& out, const Provenance& provenance, const PolicyMap& map);

}  // namespace sjde
