#include "bbm/bbm_engine.hpp"

#include <algorithm>
#include <cmath>

#include "bbm/errors.hpp"
#include "bbm/rng.hpp"

namespace bbm {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

struct Walker {
  double pos;
  double t_last;    // time of the last applied displacement
  double t_branch;  // absolute time of the next split
  Rng rng;
};

// Advances every walker to t_end, splitting on the way. Each walker owns its
// stream and children split off it, so culling one subtree never perturbs
// the draws of another; statistics are invariant under the barrier gap up to
// the analytic culling bias.
void advance_window(std::vector<Walker>& live, double t_end, std::size_t step_cap,
                    double& produced) {
  std::vector<Walker> done;
  done.reserve(live.size() + live.size() / 2);
  while (!live.empty()) {
    Walker w = live.back();
    live.pop_back();
    while (w.t_branch <= t_end) {
      const double dt = w.t_branch - w.t_last;
      w.pos += w.rng.next_gaussian() * std::sqrt(dt);
      w.t_last = w.t_branch;
      Walker child{w.pos, w.t_last, 0.0, w.rng.split()};
      child.t_branch = w.t_last + child.rng.next_exponential();
      w.t_branch = w.t_last + w.rng.next_exponential();
      live.push_back(child);
      produced += 1.0;
      if (done.size() + live.size() > step_cap) {
        throw ParticleBudgetExceeded("particle count passed step_cap");
      }
    }
    const double dt = t_end - w.t_last;
    if (dt > 0.0) w.pos += w.rng.next_gaussian() * std::sqrt(dt);
    w.t_last = t_end;
    done.push_back(w);
  }
  live.swap(done);
}

void cull(std::vector<Walker>& live, double gap, double& culled) {
  if (gap <= 0.0 || live.empty()) return;
  double mx = live.front().pos;
  for (const Walker& w : live) mx = std::max(mx, w.pos);
  const double cutoff = mx - gap;
  auto it = std::remove_if(live.begin(), live.end(),
                           [cutoff](const Walker& w) { return w.pos < cutoff; });
  culled += static_cast<double>(live.end() - it);
  live.erase(it, live.end());
}

std::vector<Walker> run_tree(Rng root_rng, const EvolveConfig& cfg, double& culled) {
  if (!(cfg.horizon > 0.0)) throw Error("simulate_bbm: horizon must be positive");
  std::vector<Walker> live;
  Walker root{0.0, 0.0, 0.0, root_rng};
  root.t_branch = root.rng.next_exponential();
  live.push_back(root);

  const double sync = cfg.sync_interval > 0.0 ? cfg.sync_interval : cfg.horizon;
  double produced = 1.0;
  double t = 0.0;
  while (t < cfg.horizon) {
    const double t_next = std::min(t + sync, cfg.horizon);
    advance_window(live, t_next, cfg.step_cap, produced);
    t = t_next;
    if (t < cfg.horizon) cull(live, cfg.barrier_gap, culled);
  }
  return live;
}

}  // namespace

ParticleCloud simulate_bbm(const EvolveConfig& cfg) {
  ParticleCloud cloud;
  cloud.time = cfg.horizon;
  cloud.barrier_gap = cfg.barrier_gap;
  Rng root = Rng::stream(cfg.seed, {0, 0});
  cloud.rng_key = root.state();
  double culled = 0.0;
  std::vector<Walker> live = run_tree(root, cfg, culled);
  cloud.positions.reserve(live.size());
  for (const Walker& w : live) cloud.positions.push_back(w.pos);
  cloud.culled_count = culled;
  cloud.culled_mass_flag = culled > 0.0;
  return cloud;
}

PointMeasure evolve(const PointMeasure& eta, const EvolveConfig& cfg) {
  if (eta.empty()) throw EmptyMeasure("evolve: empty measure");
  double roots = 0.0;
  for (const Atom& a : eta.atoms()) roots += a.multiplicity;
  if (!(roots <= static_cast<double>(cfg.step_cap))) {
    throw ParticleBudgetExceeded("evolve: initial mass exceeds step_cap");
  }

  const double drift = kSqrt2 * cfg.horizon;
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < eta.atoms().size(); ++i) {
    const Atom& src = eta.atoms()[i];
    const std::uint64_t copies = static_cast<std::uint64_t>(src.multiplicity);
    for (std::uint64_t c = 0; c < copies; ++c) {
      // One stream per (seed, atom, copy): merging is order-insensitive and
      // the result does not depend on scheduling.
      Rng root = Rng::stream(cfg.seed, {i, c});
      double culled_here = 0.0;
      std::vector<Walker> live = run_tree(root, cfg, culled_here);
      for (const Walker& w : live) {
        atoms.push_back(Atom{src.position + w.pos - drift, 1.0});
      }
      if (atoms.size() > cfg.step_cap) {
        throw ParticleBudgetExceeded("evolve: particle count passed step_cap");
      }
    }
  }
  return PointMeasure::from_atoms(std::move(atoms));
}

double m_of_t(double t) {
  if (!(t > 0.0)) throw Error("m_of_t: t must be positive");
  const double log_plus = std::max(std::log(t), 0.0);
  return kSqrt2 * t - 3.0 / (2.0 * kSqrt2) * log_plus;
}

double derivative_martingale(const ParticleCloud& cloud, MartingaleOptions opts) {
  if (!(cloud.time > 0.0)) throw Error("derivative_martingale: cloud time must be > 0");
  if (cloud.culled_mass_flag) {
    const double gap = cloud.barrier_gap;
    const double bound = (static_cast<double>(cloud.positions.size()) + cloud.culled_count) *
                         gap * std::exp(-kSqrt2 * gap);
    if (bound > opts.bias_tolerance) {
      throw CulledBiasTooLarge("derivative_martingale: culling bound above tolerance");
    }
  }
  const double front = kSqrt2 * cloud.time;
  double z = 0.0;
  for (double chi : cloud.positions) {
    const double depth = front - chi;
    z += depth * std::exp(-kSqrt2 * depth);
  }
  return z;
}

PointMeasure extremal_approximant(const ParticleCloud& cloud, Centering centering) {
  if (cloud.positions.empty()) throw EmptyMeasure("extremal_approximant: empty cloud");
  double shift = m_of_t(cloud.time);
  if (centering == Centering::m_t_plus_log_z) {
    const double z = derivative_martingale(cloud);
    if (!(z > 0.0)) throw DegenerateZ("extremal_approximant: Z_t <= 0");
    shift += std::log(z) / kSqrt2;
  }
  std::vector<Atom> atoms;
  atoms.reserve(cloud.positions.size());
  for (double chi : cloud.positions) atoms.push_back(Atom{chi - shift, 1.0});
  return PointMeasure::from_atoms(std::move(atoms));
}

}  // namespace bbm
