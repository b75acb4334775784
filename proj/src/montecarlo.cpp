#include "sjde/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace sjde {
namespace {

constexpr std::uint64_t kHypothesisDraw = 0x68797074ULL;

// Two-pass conditional moments per hypothesis.
struct Moments {
  double mean = 0.0;
  double var = 0.0;  // sample variance
  std::size_t count = 0;
};

template <class Get>
std::vector<Moments> per_hypothesis(std::span<const RunRecord> records, std::size_t hyps,
                                    Get&& get) {
  std::vector<Moments> out(hyps);
  std::vector<double> sum(hyps, 0.0);
  for (const auto& r : records) {
    sum[r.hypothesis] += get(r);
    ++out[r.hypothesis].count;
  }
  for (std::size_t m = 0; m < hyps; ++m) {
    out[m].mean = out[m].count ? sum[m] / static_cast<double>(out[m].count)
                               : std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<double> ss(hyps, 0.0);
  for (const auto& r : records) {
    const double d = get(r) - out[r.hypothesis].mean;
    ss[r.hypothesis] += d * d;
  }
  for (std::size_t m = 0; m < hyps; ++m) {
    out[m].var = out[m].count > 1 ? ss[m] / static_cast<double>(out[m].count - 1) : 0.0;
  }
  return out;
}

double standard_error(const Moments& mo) {
  return mo.count ? std::sqrt(mo.var / static_cast<double>(mo.count))
                  : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void SimulationConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (n_max < 1) throw ConfigError("n_max must be at least 1");
  if (runs > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("runs too large");
}

std::vector<std::size_t> allocate_runs(std::span<const double> priors, std::size_t runs) {
  const std::size_t hyps = priors.size();
  std::vector<std::size_t> counts(hyps);
  std::vector<double> remainder(hyps);
  std::size_t assigned = 0;
  for (std::size_t m = 0; m < hyps; ++m) {
    const double exact = priors[m] * static_cast<double>(runs);
    counts[m] = static_cast<std::size_t>(std::floor(exact));
    remainder[m] = exact - static_cast<double>(counts[m]);
    assigned += counts[m];
  }
  std::vector<std::size_t> order(hyps);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < runs; ++k, ++assigned) ++counts[order[k % hyps]];
  while (assigned > runs) {
    // Only reachable through rounding of priors that sum slightly above 1.
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  return counts;
}

std::vector<std::uint32_t> assign_hypotheses(std::span<const double> priors,
                                             const SimulationConfig& sim) {
  std::vector<std::uint32_t> out(sim.runs);
  if (sim.stratify) {
    const auto counts = allocate_runs(priors, sim.runs);
    std::size_t i = 0;
    for (std::size_t m = 0; m < counts.size(); ++m) {
      for (std::size_t c = 0; c < counts[m]; ++c) out[i++] = static_cast<std::uint32_t>(m);
    }
    return out;
  }
  for (std::size_t i = 0; i < sim.runs; ++i) {
    const std::uint64_t h = mix64(derive_seed(sim.master_seed, i) ^ kHypothesisDraw);
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    double acc = 0.0;
    std::uint32_t m = 0;
    for (; m + 1 < priors.size(); ++m) {
      acc += priors[m];
      if (u < acc) break;
    }
    out[i] = m;
  }
  return out;
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  if (threads <= 1) {
    body(0, count);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(count, t * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    workers.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

MeanEstimate mixture_mean(std::span<const double> values, std::span<const RunRecord> records,
                          std::span<const double> priors, bool stratified) {
  if (!stratified) {
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
  }
  const auto mom = per_hypothesis(records, priors.size(), [&](const RunRecord& r) {
    return values[&r - records.data()];
  });
  MeanEstimate out;
  double var = 0.0;
  for (std::size_t m = 0; m < priors.size(); ++m) {
    if (mom[m].count == 0) continue;
    out.mean += priors[m] * mom[m].mean;
    var += priors[m] * priors[m] * mom[m].var / static_cast<double>(mom[m].count);
  }
  out.se = std::sqrt(var);
  return out;
}

PerformanceEstimate estimate_performance(std::span<const RunRecord> records,
                                         std::span<const double> priors, bool stratified) {
  const std::size_t hyps = priors.size();
  PerformanceEstimate est;
  est.total_runs = records.size();
  for (const auto& r : records) est.capped_count += r.capped ? 1 : 0;

  const auto alpha = per_hypothesis(records, hyps,
                                    [](const RunRecord& r) { return r.correct() ? 0.0 : 1.0; });
  const auto beta = per_hypothesis(
      records, hyps, [](const RunRecord& r) { return r.correct() ? r.squared_error : 0.0; });
  const auto rl = per_hypothesis(records, hyps,
                                 [](const RunRecord& r) { return static_cast<double>(r.tau); });
  for (std::size_t m = 0; m < hyps; ++m) {
    est.runs_per_hyp.push_back(alpha[m].count);
    est.alpha_hat.push_back(alpha[m].mean);
    est.alpha_se.push_back(standard_error(alpha[m]));
    est.beta_hat.push_back(beta[m].mean);
    est.beta_se.push_back(standard_error(beta[m]));
    est.rl.push_back(rl[m].mean);
    est.rl_se.push_back(standard_error(rl[m]));
  }

  std::vector<double> tau(records.size());
  std::vector<double> objective(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    tau[i] = static_cast<double>(records[i].tau);
    objective[i] = records[i].objective();
  }
  const MeanEstimate overall = mixture_mean(tau, records, priors, stratified);
  est.rl_overall = overall.mean;
  est.rl_overall_se = overall.se;
  const MeanEstimate obj = mixture_mean(objective, records, priors, stratified);
  est.objective = obj.mean;
  est.objective_se = obj.se;
  return est;
}

double Sensitivity::combined_se() const {
  return std::sqrt(derivative_se * derivative_se + target_se * target_se);
}

double Sensitivity::z_score() const {
  const double se = combined_se();
  return se > 0.0 ? (derivative - target) / se : (derivative == target ? 0.0 : 1e300);
}

}  // namespace sjde
