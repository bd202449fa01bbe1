#include "bbm/doa.hpp"

#include <algorithm>
#include <cmath>

#include "bbm/errors.hpp"

namespace bbm {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt2OverPi = 0.79788456080286535588;
constexpr double kSqrtPi = 1.77245385090551602730;

void require_nonempty(const PointMeasure& eta, const char* op) {
  if (eta.empty()) throw EmptyMeasure(std::string(op) + ": empty measure");
}

}  // namespace

double cesaro_stat(const PointMeasure& eta, double y) {
  require_nonempty(eta, "cesaro_stat");
  if (!(y > 1.0)) throw Error("cesaro_stat: y must exceed 1");
  double sum = 0.0;
  for (const Atom& a : eta.atoms()) {
    const double x = -a.position;  // reflected coordinate
    if (x >= 1.0 && x <= y) sum += a.multiplicity / (x * std::exp(kSqrt2 * x));
  }
  return sum / y;
}

double cesaro_stat_ibp(const PointMeasure& eta, double y) {
  require_nonempty(eta, "cesaro_stat_ibp");
  if (!(y > 1.0)) throw Error("cesaro_stat_ibp: y must exceed 1");

  // H(x) = eta-hat([0, x]) is a right-continuous step function; between
  // consecutive atoms the dx-integral of H (sqrt2 + 1/x) / (x e^{sqrt2 x})
  // has the primitive -H / (x e^{sqrt2 x}), so each piece is summed in
  // closed form. The middle boundary term uses H(1-) so that atoms sitting
  // exactly at 1 are included, matching cesaro_stat.
  // Atoms are stored by decreasing position, so the reflected coordinates
  // come out ascending.
  std::vector<std::pair<double, double>> jumps;  // (x, multiplicity), ascending
  for (const Atom& a : eta.atoms()) {
    const double x = -a.position;
    if (x >= 0.0 && x <= y) jumps.emplace_back(x, a.multiplicity);
  }
  const auto weight = [](double x) { return 1.0 / (x * std::exp(kSqrt2 * x)); };

  double h_at_y = 0.0, h_before_1 = 0.0;
  for (const auto& [x, m] : jumps) {
    h_at_y += m;
    if (x < 1.0) h_before_1 += m;
  }

  double integral = 0.0;
  double h = 0.0;
  double x_prev = 1.0;
  for (const auto& [x, m] : jumps) {
    if (x <= 1.0) {
      h += m;
      continue;
    }
    if (h > 0.0) integral += h * (weight(x_prev) - weight(x));
    h += m;
    x_prev = x;
  }
  if (h > 0.0 && x_prev < y) integral += h * (weight(x_prev) - weight(y));

  const double value = h_at_y * weight(y) - h_before_1 * weight(1.0) + integral;
  return value / y;
}

double cubic_stat(const PointMeasure& eta, double y) {
  require_nonempty(eta, "cubic_stat");
  if (!(y > 0.0)) throw Error("cubic_stat: y must be positive");
  double sum = 0.0;
  for (const Atom& a : eta.atoms()) {
    const double x = -a.position;
    if (x >= 0.0 && x <= y) sum += a.multiplicity * x * std::exp(-kSqrt2 * x);
  }
  return sum / (y * y * y);
}

double tightness_stat(const PointMeasure& eta, double lambda) {
  require_nonempty(eta, "tightness_stat");
  if (!(lambda > 0.0)) throw Error("tightness_stat: lambda must be positive");
  double sum = 0.0;
  for (const Atom& a : eta.atoms()) {
    const double x = -a.position;
    if (x >= 0.0) sum += a.multiplicity * x * std::exp(-kSqrt2 * x - lambda * x * x);
  }
  return std::pow(lambda, 1.5) * sum;
}

double r_stat_unnormalized(const PointMeasure& eta, double s) {
  require_nonempty(eta, "r_stat");
  if (!(s > 0.0)) throw Error("r_stat: s must be positive");
  double sum = 0.0;
  for (const Atom& a : eta.atoms()) {
    const double x = -a.position;
    if (x >= 0.0) sum += a.multiplicity * x * std::exp(-kSqrt2 * x - x * x / (2.0 * s));
  }
  return sum / std::pow(s, 1.5);
}

double r_stat(const PointMeasure& eta, double s) {
  return kSqrt2OverPi * r_stat_unnormalized(eta, s);
}

bool r_stat_truncation_flagged(double s, double window_depth) {
  return s > window_depth * window_depth / 10.0;
}

double zt_stat(const PointMeasure& eta, double t, const FkppField& u_m) {
  require_nonempty(eta, "zt_stat");
  if (u_m.time != t) throw Error("zt_stat: field was not solved to time t");
  const double front = kSqrt2 * t;
  const double logt = std::log(t);
  const double t32 = std::pow(t, 1.5);
  double sum = 0.0;
  for (const Atom& a : eta.atoms()) {
    const double arg = front - a.position;
    if (arg <= u_m.x_hi()) {
      sum += a.multiplicity * u_m.value_at(arg);
    } else {
      const double x = -a.position;
      sum += a.multiplicity * (x + logt) / t32 *
             std::exp(-kSqrt2 * x - x * x / (2.0 * t));
    }
  }
  return sum;
}

FractionalMomentReport fractional_moment_check(const std::vector<PointMeasure>& ensemble,
                                               double alpha,
                                               const std::vector<double>& y_grid) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw Error("fractional_moment_check: alpha must lie in (0, 1)");
  }
  if (ensemble.empty() || y_grid.size() < 2) {
    throw Error("fractional_moment_check: need replicates and >= 2 grid points");
  }
  FractionalMomentReport report;
  report.alpha = alpha;
  report.y = y_grid;
  for (double y : y_grid) {
    double acc = 0.0;
    for (const PointMeasure& eta : ensemble) {
      acc += std::pow(cubic_stat(eta, y), alpha);
    }
    report.moment.push_back(acc / static_cast<double>(ensemble.size()));
  }

  // Bounded: no growth past the running maximum beyond 10% slack.
  // Growing: monotone increase by at least 20% overall.
  double running_max = 0.0;
  bool bounded = true;
  for (double m : report.moment) {
    if (running_max > 0.0 && m > 1.10 * running_max) bounded = false;
    running_max = std::max(running_max, m);
  }
  bool growing = true;
  for (std::size_t i = 0; i + 1 < report.moment.size(); ++i) {
    if (report.moment[i + 1] <= report.moment[i]) growing = false;
  }
  growing = growing && report.moment.back() >= 1.2 * report.moment.front();
  report.verdict = bounded      ? Verdict::supported
                   : growing    ? Verdict::contradicted
                                : Verdict::inconclusive;
  return report;
}

ShiftEstimate shift_estimator(const PointMeasure& eta, const std::vector<double>& n_grid,
                              double min_count) {
  require_nonempty(eta, "shift_estimator");
  if (n_grid.empty()) throw Error("shift_estimator: empty grid");
  ShiftEstimate est;
  double n_star = 0.0;
  double n_fallback = 0.0;
  for (double n : n_grid) {
    const double count = mass_geq(eta, -n);
    est.y_values.push_back(count / (n * std::exp(kSqrt2 * n)));
    if (count >= min_count) n_star = n;
    if (count > 0.0) n_fallback = n;
  }
  if (n_fallback == 0.0) throw EmptyTail("shift_estimator: no atoms above -n for any n");
  if (n_star == 0.0) n_star = n_fallback;
  est.n_star = n_star;
  const double y = mass_geq(eta, -n_star) / (n_star * std::exp(kSqrt2 * n_star));
  est.shift = std::log(kSqrtPi * y) / kSqrt2;
  return est;
}

double probe_decreased_exponent(const PointMeasure& eta, double s) {
  require_nonempty(eta, "probe_decreased_exponent");
  if (!(s > 0.0)) throw Error("probe_decreased_exponent: s must be positive");
  double sum = 0.0;
  for (const Atom& a : eta.atoms()) {
    const double x = -a.position;
    if (x >= 0.0) sum += a.multiplicity * std::exp(-kSqrt2 * x - x * x / (2.0 * s));
  }
  return sum / s;
}

}  // namespace bbm
