#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bbm {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

double normal_cdf(double x);
// Upper tail Q(x) = P(N(0,1) >= x).
double normal_upper(double x);
// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);
// Survival function of a chi-square with dof degrees of freedom.
double chi2_sf(double x, int dof);
// Kolmogorov distribution tail Q_KS(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
double ks_tail(double lambda);

// ---------------------------------------------------------------------------
// Descriptive statistics
// ---------------------------------------------------------------------------

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
};

Summary summarize(std::span<const double> xs);
// Linear-interpolation quantile, q in [0, 1]. Copies and sorts.
double quantile(std::span<const double> xs, double q);
double median(std::span<const double> xs);
// Mean after dropping a fraction trim of each tail.
double trimmed_mean(std::span<const double> xs, double trim);

// ---------------------------------------------------------------------------
// Hypothesis tests
// ---------------------------------------------------------------------------

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic p-value.
// Throws InsufficientReplicates if either sample has fewer than 50 points.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
// One-sample KS against a reference CDF.
KsResult ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf);

struct Chi2Result {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;
};

// Chi-square test on an r x c contingency table (independence/homogeneity).
Chi2Result chi2_contingency(const std::vector<std::vector<double>>& table);

// ---------------------------------------------------------------------------
// Convergence-in-probability verdicts
// ---------------------------------------------------------------------------

enum class Verdict { supported, contradicted, inconclusive };
const char* to_string(Verdict v);

struct ConvTestResult {
  std::vector<double> exceedance;  // P-hat(|X - target| > epsilon) per parameter
  std::vector<double> se;          // binomial standard errors
  Verdict verdict = Verdict::inconclusive;
};

// samples_by_param[i] holds replicate values at the i-th (increasing)
// parameter. Pass rule: exceedance fractions non-increasing (one inversion
// within 2 standard errors allowed) and final fraction < 0.2.
ConvTestResult conv_in_prob_test(const std::vector<std::vector<double>>& samples_by_param,
                                 double target, double epsilon);

// Deterministic-input variant: verdict from the approach of a single value
// sequence toward target at relative tolerance rel_tol.
Verdict deterministic_convergence(std::span<const double> values, double target,
                                  double rel_tol);

// ---------------------------------------------------------------------------
// Fits and hashing
// ---------------------------------------------------------------------------

struct FrontFitCoefficients {
  double speed = 0.0;      // coefficient of t
  double log_coeff = 0.0;  // coefficient of log t
  double offset = 0.0;
};

// Least squares x ~ a t + b log t + c.
FrontFitCoefficients fit_linear_log(std::span<const double> t, std::span<const double> x);

std::uint64_t fnv1a(std::string_view s);

}  // namespace bbm
