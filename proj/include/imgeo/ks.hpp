#pragma once

// Kolmogorov-Smirnov statistics with asymptotic p-values, and the tabulated
// stationary law of the radial theta equation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "imgeo/error.hpp"
#include "imgeo/geometry.hpp"

namespace imgeo {

struct KsResult {
  double d = 0.0;
  double p = 1.0;
  double n_eff = 0.0;
};

/// Kolmogorov survival function Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
inline double kolmogorov_q(double x) {
  if (x < 0.18) return 1.0;  // series converges slowly; Q is 1 to double precision here
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Stephens' small-sample correction of the scaled statistic.
inline double ks_pvalue(double d, double n_eff) {
  const double r = std::sqrt(n_eff);
  return kolmogorov_q((r + 0.12 + 0.11 / r) * d);
}

inline KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw InputError("KS test on an empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, ks_pvalue(d, n), n};
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InputError("KS test on an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  return {d, ks_pvalue(d, ne), ne};
}

/// CDF of the density proportional to sin^{2(rho+2)/kappa}(theta/2) on
/// [0, 2 pi], the stationary solution of the theta Fokker-Planck equation.
/// Tabulated by the trapezoid rule and interpolated linearly.
class ThetaStationaryCdf {
 public:
  ThetaStationaryCdf(double kappa, double rho, int cells = 20000) : cells_(cells), table_(cells + 1, 0.0) {
    if (!(kappa > 0) || !(rho > -2)) throw DomainError("stationary theta law needs kappa > 0 and rho > -2");
    const double a = 2.0 * (rho + 2.0) / kappa;
    const double h = kTwoPi / cells;
    auto f = [&](int k) { return std::pow(std::sin(0.5 * k * h), a); };
    double prev = f(0);
    for (int k = 1; k <= cells; ++k) {
      const double cur = f(k);
      table_[k] = table_[k - 1] + 0.5 * h * (prev + cur);
      prev = cur;
    }
    const double total = table_.back();
    for (double& v : table_) v /= total;
  }

  double operator()(double theta) const {
    if (theta <= 0) return 0.0;
    if (theta >= kTwoPi) return 1.0;
    const double u = theta / kTwoPi * cells_;
    const int k = std::min(static_cast<int>(u), cells_ - 1);
    const double w = u - k;
    return (1.0 - w) * table_[k] + w * table_[k + 1];
  }

 private:
  int cells_;
  std::vector<double> table_;
};

}  // namespace imgeo
