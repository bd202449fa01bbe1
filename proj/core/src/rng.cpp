#include "bbm/rng.hpp"

#include <cmath>

#include "bbm/errors.hpp"

namespace bbm {

namespace {

// Inversion by sequential search; adequate for small means.
double poisson_inversion(Rng& rng, double mean) {
  const double l = std::exp(-mean);
  double p = rng.next_unit();
  double k = 0.0;
  double cdf_term = l;
  double cum = l;
  while (p > cum) {
    k += 1.0;
    cdf_term *= mean / k;
    cum += cdf_term;
    if (cdf_term <= 0.0) break;  // underflow guard; tail mass is negligible
  }
  return k;
}

// Hormann's PTRS transformed-rejection sampler, exact for mean >= 10.
double poisson_ptrs(Rng& rng, double mean) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.next_unit() - 0.5;
    const double v = rng.next_unit_open();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return k;
    }
  }
}

}  // namespace

double Rng::next_poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw Error("next_poisson: mean must be finite and nonnegative");
  }
  if (mean == 0.0) return 0.0;
  if (mean < 10.0) return poisson_inversion(*this, mean);
  if (mean <= 1e12) return poisson_ptrs(*this, mean);
  // Relative fluctuation is mean^{-1/2} <= 1e-6; the Gaussian limit is exact
  // to far below anything the statistics downstream can resolve.
  const double z = next_gaussian();
  double k = std::nearbyint(mean + std::sqrt(mean) * z);
  return k < 0.0 ? 0.0 : k;
}

}  // namespace bbm
