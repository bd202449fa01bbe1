#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bbm/point_measure.hpp"

namespace bbm {

struct EvolveConfig {
  double horizon = 1.0;       // t > 0
  double barrier_gap = 0.0;   // Delta; <= 0 disables culling
  double sync_interval = 0.5; // culling checkpoints; exactness is unaffected
  std::size_t step_cap = 50'000'000;
  std::uint64_t seed = 0;
};

// Live population of one (or several merged) branching diffusions in the
// uncentered frame.
struct ParticleCloud {
  double time = 0.0;
  std::vector<double> positions;
  bool culled_mass_flag = false;
  double culled_count = 0.0;
  double barrier_gap = 0.0;   // gap used while producing this cloud
  std::uint64_t rng_key = 0;  // opaque stream identifier (provenance)
};

// Exact event-driven simulation from a single ancestor at the origin:
// branch epochs are unit-rate exponentials per lineage, displacements are
// Gaussian over elapsed time. Culling (when barrier_gap > 0) removes, at
// each sync checkpoint, particles further than barrier_gap below the
// running maximum. Throws ParticleBudgetExceeded past step_cap.
ParticleCloud simulate_bbm(const EvolveConfig& cfg);

// Markov transition: independent BBM per unit of multiplicity of each atom,
// final positions shifted by the atom position and recentred by -sqrt(2) t.
PointMeasure evolve(const PointMeasure& eta, const EvolveConfig& cfg);

// Median front centering sqrt(2) t - 3/(2 sqrt(2)) log_+(t).
double m_of_t(double t);

struct MartingaleOptions {
  // Cap on the analytic bound for the culled particles' contribution,
  // (live + culled) * Delta e^{-sqrt(2) Delta}.
  double bias_tolerance = 1e-6;
};

// Z_t = sum (sqrt(2) t - chi_k) exp(-sqrt(2) (sqrt(2) t - chi_k)).
// Throws CulledBiasTooLarge when the culling bound exceeds the tolerance.
double derivative_martingale(const ParticleCloud& cloud, MartingaleOptions opts = {});

enum class Centering { m_t, m_t_plus_log_z };

// E_t (recentred by m(t)) or the tilde variant (additionally recentred by
// (1/sqrt(2)) log Z_t). Throws DegenerateZ if Z_t <= 0 for the tilde variant.
PointMeasure extremal_approximant(const ParticleCloud& cloud, Centering centering);

}  // namespace bbm
