// Independent reference computations used to pin expected test values.
// Everything here is deliberately naive and separate from the library code
// paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Closed-form CDF of the first-passage time of a drifted Brownian motion
// (unit diffusion) over barrier eta, the standard inverse-Gaussian formula.
inline double ig_cdf(double eta, double lambda, double t) {
  if (t <= 0.0) return 0.0;
  const double sq = std::sqrt(t);
  return norm_cdf((lambda * t - eta) / sq) +
         std::exp(2.0 * eta * lambda) * norm_cdf(-(lambda * t + eta) / sq);
}

// Fixed-grid composite Simpson rule, independent of the adaptive routine.
inline double simpson_fixed(const std::function<double(double)>& f, double a,
                            double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// One-sample KS distance of (possibly right-censored) sorted samples against
// a CDF; censored observations enter the denominator only.
inline double ks_distance(const std::vector<double>& sorted_times,
                          std::size_t n_total,
                          const std::function<double(double)>& cdf) {
  double ks = 0.0;
  const double n = static_cast<double>(n_total);
  for (std::size_t i = 0; i < sorted_times.size(); ++i) {
    const double F = cdf(sorted_times[i]);
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - F));
    ks = std::max(ks, std::abs(static_cast<double>(i) / n - F));
  }
  return ks;
}

// Dvoretzky-Kiefer-Wolfowitz band half-width at confidence 1 - alpha.
inline double dkw_epsilon(std::size_t n, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

// Brute-force reachability over an edge list.
inline std::set<std::string> reachable_brute(
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::string& from) {
  std::set<std::string> seen;
  std::vector<std::string> stack{from};
  while (!stack.empty()) {
    const std::string cur = stack.back();
    stack.pop_back();
    for (const auto& [a, b] : edges)
      if (a == cur && seen.insert(b).second) stack.push_back(b);
  }
  return seen;
}

// OU moments from X0 toward a constant target mu.
inline double ou_mean(double x0, double mu, double theta, double t) {
  return mu + (x0 - mu) * std::exp(-theta * t);
}
inline double ou_variance(double sigma, double theta, double t) {
  return sigma * sigma * (1.0 - std::exp(-2.0 * theta * t)) / (2.0 * theta);
}

}  // namespace oracle
