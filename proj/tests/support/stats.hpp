#pragma once

// Small statistics helpers for the randomized tests: chi-square p-values via
// the regularized incomplete gamma function, and two-sample chi-square over
// histograms with rare-bin pooling.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace teststat {

inline double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum;
  for (int n = 1; n < 600; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
  double b = x + 1 - a, c = 1e300, d = 1 / b, h = d;
  for (int i = 1; i < 600; ++i) {
    double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

/// Upper tail Q(a, x) = P(Gamma(a) > x) regularized.
inline double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q domain");
  if (x == 0) return 1.0;
  if (x < a + 1) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

/// P-value of a chi-square statistic with df degrees of freedom.
inline double chi2_pvalue(double stat, double df) { return gamma_q(df / 2.0, stat / 2.0); }

/// Two-sample chi-square over integer-keyed histograms; bins with a combined
/// count below `min_bin` are pooled. Returns the p-value (1.0 when fewer
/// than two effective bins remain).
inline double chi2_two_sample(const std::map<int64_t, int64_t>& h1,
                              const std::map<int64_t, int64_t>& h2, int64_t min_bin = 10) {
  std::map<int64_t, std::pair<int64_t, int64_t>> joint;
  int64_t n1 = 0, n2 = 0;
  for (auto& [k, c] : h1) {
    joint[k].first += c;
    n1 += c;
  }
  for (auto& [k, c] : h2) {
    joint[k].second += c;
    n2 += c;
  }
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("empty sample");
  std::vector<std::pair<double, double>> bins;
  double pool1 = 0, pool2 = 0, pooled = 0;
  for (auto& [k, c] : joint) {
    if (c.first + c.second < min_bin) {
      pool1 += static_cast<double>(c.first);
      pool2 += static_cast<double>(c.second);
      pooled += static_cast<double>(c.first + c.second);
    } else {
      bins.emplace_back(static_cast<double>(c.first), static_cast<double>(c.second));
    }
  }
  if (pooled >= static_cast<double>(min_bin)) bins.emplace_back(pool1, pool2);
  if (bins.size() < 2) return 1.0;
  double k1 = std::sqrt(static_cast<double>(n2) / static_cast<double>(n1));
  double k2 = std::sqrt(static_cast<double>(n1) / static_cast<double>(n2));
  double stat = 0;
  for (auto& [a, b] : bins) {
    double num = k1 * a - k2 * b;
    stat += num * num / (a + b);
  }
  return chi2_pvalue(stat, static_cast<double>(bins.size() - 1));
}

struct RunningStat {
  int64_t n = 0;
  double mean = 0, m2 = 0;
  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stderr_mean() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

}  // namespace teststat
