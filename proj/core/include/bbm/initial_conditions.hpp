#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bbm/point_measure.hpp"

namespace bbm {

// Construction recipe for the initial point measure theta_0, truncated to
// the window [-L, 0].
struct InitialSpec {
  enum class Mode { poisson_sample, deterministic_lattice, file };

  Mode mode = Mode::poisson_sample;
  IntensityDescriptor descriptor = IntensityDescriptor::abk();
  double window_depth = 40.0;  // L > 0
  std::string file_path;

  // Sampler resolution. Unit cells whose mass does not exceed exact_cell_cap
  // draw every atom position individually; heavier cells are split into
  // subcells_per_unit bins whose Poisson counts are placed as one
  // multiplicity atom at the bin's density centroid. The intensity mass
  // grows like e^{sqrt(2) L}, so atom-level sampling of deep windows is not
  // possible; the binned placement changes smooth-statistic values by
  // O(width^2) ~ 1e-6 relative at the default width 1/256.
  double exact_cell_cap = 4096.0;
  int subcells_per_unit = 256;
  int table_points_per_unit = 250;  // inverse-CDF nodes per unit cell
};

struct SampleInfo {
  bool resampled = false;
  int rejections = 0;
  double expected_mass = 0.0;
};

// Poisson sampler with per-unit-cell sub-streams: cell j covers
// [-(j+1), -j] (clipped at -L) and owns streams keyed by (seed, role, j,
// attempt), so enlarging L reproduces the old window's atoms bit-exactly.
class PppSampler {
 public:
  explicit PppSampler(InitialSpec spec);

  PointMeasure sample(std::uint64_t seed, SampleInfo* info = nullptr) const;

  double expected_mass() const { return total_mass_; }
  int cell_count() const { return static_cast<int>(cells_.size()); }
  double cell_mass(int cell) const;

 private:
  struct Cell {
    double lo = 0.0, hi = 0.0;
    double mass = 0.0;
    bool exact = true;
    std::vector<double> cdf;  // exact cells: cumulative mass at table nodes
    std::vector<double> sub_mass;
    std::vector<double> sub_centroid;
  };

  InitialSpec spec_;
  std::vector<Cell> cells_;
  double total_mass_ = 0.0;
};

// One-shot convenience wrapper around PppSampler.
PointMeasure sample_ppp(const InitialSpec& spec, std::uint64_t seed,
                        SampleInfo* info = nullptr);

// Deterministic lattice measure: atoms at -n, n = 1..floor(L), with
// multiplicity round(sqrt(2/pi) n e^{sqrt(2) n}) (round half to even), plus
// one atom at the origin. Requires L >= 2; throws Overflow when the
// multiplicity leaves the representable range.
PointMeasure lattice_measure(double L);

// Negative control: multiplicities round(sqrt(2/pi) n^2 e^{sqrt(2) n}), a
// perfectly valid member of the state space whose Cesaro statistic diverges.
PointMeasure violating_measure(double L);

// Dispatch on spec.mode.
PointMeasure realize_initial(const InitialSpec& spec, std::uint64_t seed,
                             SampleInfo* info = nullptr);

}  // namespace bbm
