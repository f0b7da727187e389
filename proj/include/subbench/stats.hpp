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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace subbench::stats {

/// One evaluation posterior cell: the metric values observed across
/// replicates at a fixed subset size.
struct SampleSet {
  std::vector<double> values;
  std::string metric;
  std::uint64_t subset_size = 0;
};

struct NormalityTestResult {
  std::string test_name;  // "chi_square" or "anderson_darling"
  double statistic = 0.0;
  double p_value = 1.0;
  int h = 0;  // 1 iff p_value < alpha
  double alpha = 0.10;
};

struct VarianceScalingReport {
  std::vector<std::uint64_t> sizes;
  std::vector<double> variances;
  bool monotone_decreasing = false;
  double inverse_fit_c = 0.0;   // least-squares c in v ~ c/s
  double inverse_fit_r2 = 0.0;  // R^2 of that fit
};

/// Arithmetic mean and unbiased (n-1) sample variance. n >= 2.
std::pair<double, double> mean_variance(std::span<const double> values);

/// Standard normal CDF, Phi(x).
double std_normal_cdf(double x);

/// Inverse of Phi on (0, 1).
double std_normal_quantile(double p);

/// Upper-tail probability of a chi-square variable with `dof` degrees of
/// freedom, i.e. the regularized upper incomplete gamma Q(dof/2, x/2).
double chi2_sf(double x, int dof);

/// Chi-square goodness-of-fit test against a normal with both parameters
/// estimated from the sample. Bins are equal-probability intervals under the
/// fitted normal; `bins` = 0 selects max(5, n/10). Degrees of freedom are
/// bins - 3 (two estimated parameters).
NormalityTestResult chi_square_normality(const SampleSet& s, double alpha,
                                         int bins = 0);

/// Anderson-Darling normality test, both parameters estimated (case 3), with
/// the small-sample correction A*^2 = A^2 (1 + 0.75/n + 2.25/n^2) and the
/// standard piecewise-exponential p-value approximation.
NormalityTestResult anderson_darling_normality(const SampleSet& s,
                                               double alpha);

/// Both tests with shared fitted mean and standard deviation.
std::pair<NormalityTestResult, NormalityTestResult> normality_report(
    const SampleSet& s, double alpha);

/// Checks strict monotone decrease of variance with size and fits the
/// origin-constrained inverse law v = c/s by least squares.
VarianceScalingReport variance_scaling(std::span<const std::uint64_t> sizes,
                                       std::span<const double> variances);

/// CSV row "metric,size,test,statistic,p,h,alpha".
std::string to_csv_row(const SampleSet& s, const NormalityTestResult& r);

}  // namespace subbench::stats
