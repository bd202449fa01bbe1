#include "bbm/stats.hpp"

#include <algorithm>
#include <cmath>

#include "bbm/errors.hpp"

namespace bbm {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_upper(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw Error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw Error("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double x, int dof) { return gamma_q(0.5 * dof, 0.5 * x); }

double ks_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

Summary summarize(std::span<const double> xs) {
  Summary s;
  s.n = xs.size();
  if (s.n == 0) return s;
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(s.n);
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  s.mean = m;
  if (s.n > 1) {
    s.sd = std::sqrt(v / static_cast<double>(s.n - 1));
    s.se = s.sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) throw Error("quantile: empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

double median(std::span<const double> xs) { return quantile(xs, 0.5); }

double trimmed_mean(std::span<const double> xs, double trim) {
  if (xs.empty()) throw Error("trimmed_mean: empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const std::size_t k = static_cast<std::size_t>(trim * static_cast<double>(v.size()));
  if (2 * k >= v.size()) throw Error("trimmed_mean: trim too large");
  double m = 0.0;
  for (std::size_t i = k; i < v.size() - k; ++i) m += v[i];
  return m / static_cast<double>(v.size() - 2 * k);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 50 || b.size() < 50) {
    throw InsufficientReplicates("ks_two_sample: need at least 50 samples per side");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  KsResult r;
  r.statistic = d;
  r.p_value = ks_tail((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

KsResult ks_one_sample(std::span<const double> xs,
                       const std::function<double(double)>& cdf) {
  if (xs.size() < 10) throw InsufficientReplicates("ks_one_sample: need >= 10 samples");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  const double sn = std::sqrt(n);
  KsResult r;
  r.statistic = d;
  r.p_value = ks_tail((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

Chi2Result chi2_contingency(const std::vector<std::vector<double>>& table) {
  const std::size_t rows = table.size();
  if (rows < 2) throw Error("chi2_contingency: need >= 2 rows");
  const std::size_t cols = table.front().size();
  if (cols < 2) throw Error("chi2_contingency: need >= 2 columns");

  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (table[r].size() != cols) throw Error("chi2_contingency: ragged table");
    for (std::size_t c = 0; c < cols; ++c) {
      row_sum[r] += table[r][c];
      col_sum[c] += table[r][c];
      total += table[r][c];
    }
  }
  if (total <= 0.0) throw Error("chi2_contingency: empty table");

  Chi2Result res;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double expected = row_sum[r] * col_sum[c] / total;
      if (expected > 0.0) {
        const double diff = table[r][c] - expected;
        res.statistic += diff * diff / expected;
      }
    }
  }
  res.dof = static_cast<int>((rows - 1) * (cols - 1));
  res.p_value = chi2_sf(res.statistic, res.dof);
  return res;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::supported: return "supported";
    case Verdict::contradicted: return "contradicted";
    default: return "inconclusive";
  }
}

ConvTestResult conv_in_prob_test(const std::vector<std::vector<double>>& samples_by_param,
                                 double target, double epsilon) {
  if (samples_by_param.size() < 3) {
    throw InsufficientReplicates("conv_in_prob_test: need >= 3 parameter values");
  }
  ConvTestResult out;
  for (const auto& samples : samples_by_param) {
    if (samples.size() < 200) {
      throw InsufficientReplicates("conv_in_prob_test: need >= 200 replicates per parameter");
    }
    std::size_t exceed = 0;
    for (double x : samples) {
      if (std::fabs(x - target) > epsilon) ++exceed;
    }
    const double n = static_cast<double>(samples.size());
    const double p = static_cast<double>(exceed) / n;
    out.exceedance.push_back(p);
    out.se.push_back(std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n));
  }

  int inversions = 0;
  bool hard_inversion = false;
  for (std::size_t i = 0; i + 1 < out.exceedance.size(); ++i) {
    const double rise = out.exceedance[i + 1] - out.exceedance[i];
    if (rise > 0.0) {
      ++inversions;
      const double slack = 2.0 * std::hypot(out.se[i], out.se[i + 1]);
      if (rise > slack) hard_inversion = true;
    }
  }
  const double last = out.exceedance.back();
  const double first = out.exceedance.front();
  if (!hard_inversion && inversions <= 1 && last < 0.2) {
    out.verdict = Verdict::supported;
  } else if (last >= 0.5 || (last >= 0.2 && last + 2.0 * out.se.back() >= first)) {
    out.verdict = Verdict::contradicted;
  } else {
    out.verdict = Verdict::inconclusive;
  }
  return out;
}

Verdict deterministic_convergence(std::span<const double> values, double target,
                                  double rel_tol) {
  if (values.empty()) return Verdict::inconclusive;
  const double scale = std::fabs(target) > 0.0 ? std::fabs(target) : 1.0;
  const double first = std::fabs(values.front() - target);
  const double last = std::fabs(values.back() - target);
  if (last <= rel_tol * scale && last <= first + rel_tol * scale) {
    return Verdict::supported;
  }
  if (last > 0.5 * scale && last >= first) return Verdict::contradicted;
  return Verdict::inconclusive;
}

FrontFitCoefficients fit_linear_log(std::span<const double> t, std::span<const double> x) {
  if (t.size() != x.size() || t.size() < 4) throw Error("fit_linear_log: bad inputs");
  // Normal equations for basis {t, log t, 1} in long double.
  long double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  long double rhs[3] = {0, 0, 0};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const long double phi[3] = {static_cast<long double>(t[i]),
                                std::log(static_cast<long double>(t[i])), 1.0L};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += phi[r] * phi[c];
      rhs[r] += phi[r] * static_cast<long double>(x[i]);
    }
  }
  // Gaussian elimination with partial pivoting.
  int idx[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(static_cast<double>(m[idx[r]][col])) >
          std::fabs(static_cast<double>(m[idx[piv]][col]))) {
        piv = r;
      }
    }
    std::swap(idx[col], idx[piv]);
    for (int r = col + 1; r < 3; ++r) {
      const long double f = m[idx[r]][col] / m[idx[col]][col];
      for (int c = col; c < 3; ++c) m[idx[r]][c] -= f * m[idx[col]][c];
      rhs[idx[r]] -= f * rhs[idx[col]];
    }
  }
  long double sol[3];
  for (int r = 2; r >= 0; --r) {
    long double acc = rhs[idx[r]];
    for (int c = r + 1; c < 3; ++c) acc -= m[idx[r]][c] * sol[c];
    sol[r] = acc / m[idx[r]][r];
  }
  return {static_cast<double>(sol[0]), static_cast<double>(sol[1]),
          static_cast<double>(sol[2])};
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace bbm
