#include "srelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "srelab/error.hpp"

namespace srelab::stats {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw DomainError("mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
  if (xs.size() < 2) throw DomainError("variance: need at least two points");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

Estimate mean_estimate(const std::vector<double>& xs) {
  Estimate e;
  e.value = mean(xs);
  e.reps = xs.size();
  e.std_error = xs.size() > 1
                    ? std::sqrt(variance(xs) / static_cast<double>(xs.size()))
                    : 0.0;
  return e;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw DomainError("quantile: empty sample");
  if (q < 0.0 || q > 1.0) throw DomainError("quantile: q outside [0,1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  return quantile_sorted(xs, q);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

double iqr(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return quantile_sorted(xs, 0.75) - quantile_sorted(xs, 0.25);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_distance_normal(std::vector<double> xs, double variance) {
  if (variance <= 0.0) throw DomainError("ks_distance_normal: variance <= 0");
  if (xs.empty()) throw DomainError("ks_distance_normal: empty sample");
  std::sort(xs.begin(), xs.end());
  const double sd = std::sqrt(variance);
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i] / sd);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
  }
  return d;
}

double chi_square_upper(double statistic, double dof) {
  if (dof <= 0.0) throw DomainError("chi_square_upper: dof <= 0");
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

double correlation(const std::vector<double>& xs,
                   const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw DomainError("correlation: mismatched or short samples");
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DomainError("correlation: zero-variance sample");
  return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> ranks(const std::vector<double>& xs) {
  const size_t n = xs.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return xs[a] < xs[b]; });
  std::vector<double> r(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  return correlation(ranks(xs), ranks(ys));
}

void Digest::feed(const char* data, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    state_ ^= static_cast<unsigned char>(data[i]);
    state_ *= 0x100000001B3ULL;
  }
}

void Digest::add(double x) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g;", x);
  feed(buf, static_cast<size_t>(n));
}

void Digest::add(uint64_t x) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%llu;",
                              static_cast<unsigned long long>(x));
  feed(buf, static_cast<size_t>(n));
}

void Digest::add(const std::string& s) {
  feed(s.data(), s.size());
  feed(";", 1);
}

std::string Digest::hex() const {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(state_));
  return std::string(buf);
}

}  // namespace srelab::stats
