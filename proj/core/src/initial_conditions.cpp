#include "bbm/initial_conditions.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>

#include "bbm/errors.hpp"
#include "bbm/io.hpp"
#include "bbm/quadrature.hpp"
#include "bbm/rng.hpp"

namespace bbm {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt2OverPi = 0.79788456080286535588;

// Stream roles inside one sample.
constexpr std::uint64_t kCountRole = 1;
constexpr std::uint64_t kPositionRole = 2;
constexpr std::uint64_t kAggregateRole = 3;

}  // namespace

PppSampler::PppSampler(InitialSpec spec) : spec_(std::move(spec)) {
  if (spec_.mode != InitialSpec::Mode::poisson_sample) {
    throw Error("PppSampler: spec mode is not poisson_sample");
  }
  if (!(spec_.window_depth > 0.0)) throw Error("PppSampler: window depth must be positive");
  if (spec_.subcells_per_unit < 1 || spec_.table_points_per_unit < 8) {
    throw Error("PppSampler: bad resolution parameters");
  }

  const double L = spec_.window_depth;
  const int n_cells = static_cast<int>(std::ceil(L));
  cells_.resize(n_cells);
  const auto& d = spec_.descriptor;

  for (int j = 0; j < n_cells; ++j) {
    Cell& cell = cells_[j];
    cell.hi = -static_cast<double>(j);
    cell.lo = std::max(-L, -static_cast<double>(j + 1));
    const auto mass = integrate([&](double x) { return d.density(x); }, cell.lo,
                                cell.hi, 1e-12);
    cell.mass = mass.value;
    if (!std::isfinite(cell.mass) || cell.mass < 0.0) {
      throw NonIntegrable("PppSampler: cell mass is not finite");
    }
    total_mass_ += cell.mass;

    cell.exact = cell.mass <= spec_.exact_cell_cap;
    if (cell.exact) {
      const int n = spec_.table_points_per_unit;
      cell.cdf.resize(n + 1);
      cell.cdf[0] = 0.0;
      const double h = (cell.hi - cell.lo) / n;
      double prev = d.density(cell.lo);
      for (int i = 1; i <= n; ++i) {
        const double cur = d.density(cell.lo + i * h);
        cell.cdf[i] = cell.cdf[i - 1] + 0.5 * (prev + cur) * h;
        prev = cur;
      }
    } else {
      const int s = spec_.subcells_per_unit;
      cell.sub_mass.resize(s);
      cell.sub_centroid.resize(s);
      const double w = (cell.hi - cell.lo) / s;
      for (int k = 0; k < s; ++k) {
        const double a = cell.lo + k * w;
        const double b = a + w;
        const double m = integrate([&](double x) { return d.density(x); }, a, b, 1e-12);
        const double xm =
            integrate([&](double x) { return x * d.density(x); }, a, b, 1e-12);
        cell.sub_mass[k] = m;
        cell.sub_centroid[k] = m > 0.0 ? xm / m : 0.5 * (a + b);
        if (!std::isfinite(m)) throw NonIntegrable("PppSampler: subcell mass overflow");
      }
    }
  }
  if (!std::isfinite(total_mass_) || total_mass_ <= 0.0) {
    throw NonIntegrable("PppSampler: window mass must be positive and finite");
  }
}

double PppSampler::cell_mass(int cell) const {
  if (cell < 0 || cell >= cell_count()) throw Error("cell_mass: index out of range");
  return cells_[cell].mass;
}

PointMeasure PppSampler::sample(std::uint64_t seed, SampleInfo* info) const {
  std::vector<Atom> atoms;
  int rejections = 0;
  for (std::uint64_t attempt = 0;; ++attempt) {
    atoms.clear();
    for (std::size_t j = 0; j < cells_.size(); ++j) {
      const Cell& cell = cells_[j];
      if (cell.mass <= 0.0) continue;
      if (cell.exact) {
        Rng count_rng = Rng::stream(seed, {kCountRole, j, attempt});
        const double count = count_rng.next_poisson(cell.mass);
        if (count <= 0.0) continue;
        Rng pos_rng = Rng::stream(seed, {kPositionRole, j, attempt});
        const double table_mass = cell.cdf.back();
        const double h = (cell.hi - cell.lo) / (cell.cdf.size() - 1);
        for (double i = 0.0; i < count; i += 1.0) {
          const double target = pos_rng.next_unit() * table_mass;
          const auto it = std::lower_bound(cell.cdf.begin(), cell.cdf.end(), target);
          std::size_t hi_idx = static_cast<std::size_t>(it - cell.cdf.begin());
          if (hi_idx == 0) hi_idx = 1;
          const double c0 = cell.cdf[hi_idx - 1];
          const double c1 = cell.cdf[hi_idx];
          const double frac = c1 > c0 ? (target - c0) / (c1 - c0) : 0.0;
          atoms.push_back(
              Atom{cell.lo + (static_cast<double>(hi_idx - 1) + frac) * h, 1.0});
        }
      } else {
        Rng agg_rng = Rng::stream(seed, {kAggregateRole, j, attempt});
        for (std::size_t k = 0; k < cell.sub_mass.size(); ++k) {
          const double count = agg_rng.next_poisson(cell.sub_mass[k]);
          if (count >= 1.0) atoms.push_back(Atom{cell.sub_centroid[k], count});
        }
      }
    }
    if (!atoms.empty()) break;
    ++rejections;  // the state space excludes the null measure; redraw
  }
  if (info) {
    info->resampled = rejections > 0;
    info->rejections = rejections;
    info->expected_mass = total_mass_;
  }
  return PointMeasure::from_atoms(std::move(atoms));
}

PointMeasure sample_ppp(const InitialSpec& spec, std::uint64_t seed, SampleInfo* info) {
  return PppSampler(spec).sample(seed, info);
}

namespace {

PointMeasure graded_lattice(double L, bool quadratic) {
  if (!(L >= 2.0)) throw Error("lattice construction requires L >= 2");
  std::vector<Atom> atoms;
  const int n_max = static_cast<int>(std::floor(L));
  const int saved_rounding = std::fegetround();
  std::fesetround(FE_TONEAREST);  // round half to even
  for (int n = 1; n <= n_max; ++n) {
    const double scale = quadratic ? static_cast<double>(n) * n : static_cast<double>(n);
    const double mult = std::nearbyint(kSqrt2OverPi * scale * std::exp(kSqrt2 * n));
    if (!std::isfinite(mult)) {
      std::fesetround(saved_rounding);
      throw Overflow("lattice multiplicity exceeds the representable range");
    }
    atoms.push_back(Atom{-static_cast<double>(n), std::max(mult, 1.0)});
  }
  std::fesetround(saved_rounding);
  return PointMeasure::from_atoms(std::move(atoms));
}

}  // namespace

PointMeasure lattice_measure(double L) {
  PointMeasure negative = graded_lattice(L, /*quadratic=*/false);
  return superpose(negative, PointMeasure::delta(0.0, 1.0));
}

PointMeasure violating_measure(double L) { return graded_lattice(L, /*quadratic=*/true); }

PointMeasure realize_initial(const InitialSpec& spec, std::uint64_t seed,
                             SampleInfo* info) {
  switch (spec.mode) {
    case InitialSpec::Mode::poisson_sample:
      return sample_ppp(spec, seed, info);
    case InitialSpec::Mode::deterministic_lattice:
      return lattice_measure(spec.window_depth);
    case InitialSpec::Mode::file:
      return read_point_measure(spec.file_path);
  }
  throw Error("realize_initial: unknown mode");
}

}  // namespace bbm
