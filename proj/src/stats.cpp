// Copyright 2026 The subbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "subbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "subbench/error.hpp"

namespace subbench::stats {
namespace {

// Regularized lower incomplete gamma P(a, x) by series expansion.
// Converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction.
// Converges quickly for x >= a + 1.
double gamma_q_cf(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

struct Moments {
  double mean;
  double sd;  // sqrt of unbiased variance
  std::size_t n;
};

Moments fit_moments(const SampleSet& s) {
  const std::size_t n = s.values.size();
  if (n < 8) {
    raise(errkind::kDegenerateSample,
          "normality tests need at least 8 values, got " + std::to_string(n));
  }
  for (double v : s.values) {
    if (!std::isfinite(v)) {
      raise(errkind::kInvalidStatistic, "non-finite sample value");
    }
  }
  auto [mean, var] = mean_variance(s.values);
  if (var <= 0.0) {
    raise(errkind::kDegenerateSample, "sample variance is zero");
  }
  return {mean, std::sqrt(var), n};
}

NormalityTestResult chi_square_impl(const SampleSet& s, const Moments& m,
                                    double alpha, int bins) {
  const std::size_t n = m.n;
  if (bins == 0) bins = std::max<int>(5, static_cast<int>(n / 10));
  if (bins < 4) {
    raise(errkind::kTooFewBins,
          "chi-square binning needs >= 4 bins, got " + std::to_string(bins));
  }

  // Equal-probability bin edges under the fitted normal.
  std::vector<double> edges(bins - 1);
  for (int k = 1; k < bins; ++k) {
    edges[k - 1] =
        m.mean + m.sd * std_normal_quantile(static_cast<double>(k) / bins);
  }

  std::vector<std::uint64_t> observed(bins, 0);
  for (double v : s.values) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    ++observed[static_cast<std::size_t>(it - edges.begin())];
  }

  const double expected = static_cast<double>(n) / bins;
  double stat = 0.0;
  for (int k = 0; k < bins; ++k) {
    const double d = static_cast<double>(observed[k]) - expected;
    stat += d * d / expected;
  }

  const int dof = bins - 3;
  NormalityTestResult r;
  r.test_name = "chi_square";
  r.statistic = stat;
  r.p_value = chi2_sf(stat, dof);
  r.alpha = alpha;
  r.h = r.p_value < alpha ? 1 : 0;
  return r;
}

// D'Agostino & Stephens piecewise approximation of the A*^2 p-value for the
// normality case with both parameters estimated.
double ad_p_value(double a) {
  double p;
  if (a >= 0.6) {
    p = std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
  } else if (a >= 0.34) {
    p = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
  } else if (a > 0.2) {
    p = 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
  } else {
    p = 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
  }
  return std::clamp(p, 0.0, 1.0);
}

NormalityTestResult anderson_darling_impl(const SampleSet& s,
                                          const Moments& m, double alpha) {
  const std::size_t n = m.n;
  std::vector<double> z(s.values.begin(), s.values.end());
  std::sort(z.begin(), z.end());
  for (double& v : z) v = (v - m.mean) / m.sd;

  // ln Phi(z_i) and ln(1 - Phi(z_{n+1-i})) = ln Phi(-z_{n+1-i}).
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std_normal_cdf(z[i]);
    const double hi = std_normal_cdf(-z[n - 1 - i]);
    if (lo <= 0.0 || hi <= 0.0) {
      raise(errkind::kNumericalUnderflow,
            "normal CDF underflow in Anderson-Darling statistic");
    }
    acc += (2.0 * static_cast<double>(i + 1) - 1.0) *
           (std::log(lo) + std::log(hi));
  }
  const double a2 = -static_cast<double>(n) - acc / static_cast<double>(n);
  const double nd = static_cast<double>(n);
  const double a2_star = a2 * (1.0 + 0.75 / nd + 2.25 / (nd * nd));

  NormalityTestResult r;
  r.test_name = "anderson_darling";
  r.statistic = a2_star;
  r.p_value = ad_p_value(a2_star);
  r.alpha = alpha;
  r.h = r.p_value < alpha ? 1 : 0;
  return r;
}

}  // namespace

std::pair<double, double> mean_variance(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) {
    raise(errkind::kDegenerateSample,
          "variance needs at least 2 values, got " + std::to_string(n));
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  return {mean, ss / static_cast<double>(n - 1)};
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    raise(errkind::kInvalidQuery, "quantile probability must be in (0,1)");
  }
  // Acklam's rational approximation, then two Newton refinements against the
  // erfc-based CDF; accurate to ~1e-15 over the usable range.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  for (int i = 0; i < 2; ++i) {
    const double e = std_normal_cdf(x) - p;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    if (pdf <= 0.0) break;
    x -= e / pdf;
  }
  return x;
}

double chi2_sf(double x, int dof) {
  if (x < 0.0 || !std::isfinite(x)) {
    raise(errkind::kInvalidStatistic, "chi-square statistic must be >= 0");
  }
  if (dof < 1) {
    raise(errkind::kInvalidStatistic, "degrees of freedom must be >= 1");
  }
  return gamma_q(0.5 * dof, 0.5 * x);
}

NormalityTestResult chi_square_normality(const SampleSet& s, double alpha,
                                         int bins) {
  return chi_square_impl(s, fit_moments(s), alpha, bins);
}

NormalityTestResult anderson_darling_normality(const SampleSet& s,
                                               double alpha) {
  return anderson_darling_impl(s, fit_moments(s), alpha);
}

std::pair<NormalityTestResult, NormalityTestResult> normality_report(
    const SampleSet& s, double alpha) {
  const Moments m = fit_moments(s);
  return {chi_square_impl(s, m, alpha, 0), anderson_darling_impl(s, m, alpha)};
}

VarianceScalingReport variance_scaling(std::span<const std::uint64_t> sizes,
                                       std::span<const double> variances) {
  if (sizes.size() != variances.size()) {
    raise(errkind::kShapeMismatch, "sizes and variances differ in length");
  }
  if (sizes.size() < 2) {
    raise(errkind::kShapeMismatch, "variance scaling needs >= 2 points");
  }
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    if (sizes[i] >= sizes[i + 1]) {
      raise(errkind::kShapeMismatch, "sizes must be strictly increasing");
    }
  }
  for (double v : variances) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      raise(errkind::kShapeMismatch, "variances must be positive and finite");
    }
  }

  VarianceScalingReport rep;
  rep.sizes.assign(sizes.begin(), sizes.end());
  rep.variances.assign(variances.begin(), variances.end());

  rep.monotone_decreasing = true;
  for (std::size_t i = 0; i + 1 < variances.size(); ++i) {
    if (!(variances[i + 1] < variances[i])) {
      rep.monotone_decreasing = false;
      break;
    }
  }

  // Least squares through the origin in 1/s: v ~ c * (1/s).
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double inv = 1.0 / static_cast<double>(sizes[i]);
    num += variances[i] * inv;
    den += inv * inv;
  }
  rep.inverse_fit_c = num / den;

  double vbar = 0.0;
  for (double v : variances) vbar += v;
  vbar /= static_cast<double>(variances.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double fit = rep.inverse_fit_c / static_cast<double>(sizes[i]);
    ss_res += (variances[i] - fit) * (variances[i] - fit);
    ss_tot += (variances[i] - vbar) * (variances[i] - vbar);
  }
  rep.inverse_fit_r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot
                                    : (ss_res == 0.0 ? 1.0 : 0.0);
  return rep;
}

std::string to_csv_row(const SampleSet& s, const NormalityTestResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%llu,%s,%.6g,%.6g,%d,%.6g",
                s.metric.c_str(),
                static_cast<unsigned long long>(s.subset_size),
                r.test_name.c_str(), r.statistic, r.p_value, r.h, r.alpha);
  return buf;
}

}  // namespace subbench::stats
