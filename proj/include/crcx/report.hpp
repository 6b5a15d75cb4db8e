#pragma once

// Per-condition verification reports: per-point residuals plus the summary
// the CLI serializes. Deterministic given (chart, map, seed, tolerances).

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace crcx {

struct ConditionReport {
  std::string id;      // stable machine identifier, e.g. "weierstrass.3"
  std::string anchor;  // the identity in frame notation
  std::vector<double> per_point;
  double max_residual = 0;
  double mean_residual = 0;
  double tolerance = 0;
  bool pass = false;
  int points = 0;
  std::uint64_t seed = 0;

  void add(double r) { per_point.push_back(r); }

  ConditionReport& finalize(double tol, std::uint64_t seed_in) {
    tolerance = tol;
    seed = seed_in;
    points = static_cast<int>(per_point.size());
    max_residual = 0;
    double sum = 0;
    for (double r : per_point) {
      max_residual = std::max(max_residual, r);
      sum += r;
    }
    mean_residual = per_point.empty() ? 0 : sum / static_cast<double>(per_point.size());
    pass = max_residual < tol;
    return *this;
  }
};

inline double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0;
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size() - 1));
}

}  // namespace crcx
