#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srelab/estimate.hpp"

namespace srelab::stats {

// Half-width of the central 50% of a standard normal: IQR = kNormalIqr * sigma.
inline constexpr double kNormalIqr = 1.3489795003921634;

double mean(const std::vector<double>& xs);
double variance(const std::vector<double>& xs);  // denominator n-1
Estimate mean_estimate(const std::vector<double>& xs);

// Quantile with linear interpolation between order statistics (type 7).
double quantile_sorted(const std::vector<double>& sorted, double q);
double quantile(std::vector<double> xs, double q);
double median(std::vector<double> xs);
double iqr(std::vector<double> xs);

// Standard normal CDF.
double normal_cdf(double z);

// Kolmogorov-Smirnov distance of a sample against N(0, variance).
double ks_distance_normal(std::vector<double> xs, double variance);

// Upper tail probability of a chi-square distribution.
double chi_square_upper(double statistic, double dof);

// Pearson correlation.
double correlation(const std::vector<double>& xs, const std::vector<double>& ys);

// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// 64-bit FNV-1a over a canonical text rendering of doubles.  Used for the
// run digest: the same statistics in the same order always hash identically.
class Digest {
 public:
  void add(double x);
  void add(uint64_t x);
  void add(const std::string& s);
  uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  uint64_t state_ = 0xCBF29CE484222325ULL;
  void feed(const char* data, size_t n);
};

}  // namespace srelab::stats
