#include "bbm/fkpp.hpp"

#include <algorithm>
#include <cmath>

#include "bbm/bbm_engine.hpp"
#include "bbm/errors.hpp"
#include "bbm/io.hpp"
#include "bbm/quadrature.hpp"
#include "bbm/rng.hpp"
#include "bbm/stats.hpp"

namespace bbm {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt2OverPi = 0.79788456080286535588;

// Exact flow of u' = u - u^2 over time h.
inline double logistic_flow(double u, double eh) {
  // eh = e^h precomputed by the caller.
  return u * eh / (1.0 + u * (eh - 1.0));
}

}  // namespace

double FkppField::value_at(double x) const {
  if (u.empty()) return 0.0;
  const double pos = (x - x_lo) / dx;
  if (pos <= 0.0) return u.front();
  const double last = static_cast<double>(u.size() - 1);
  if (pos >= last) return u.back();
  const std::size_t i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return u[i] * (1.0 - frac) + u[i + 1] * frac;
}

bool FkppField::monotone_nonincreasing(double tol) const {
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    if (u[i + 1] > u[i] + tol) return false;
  }
  return true;
}

InitialProfile InitialProfile::heaviside() {
  InitialProfile p;
  p.phi_ = [](double x) { return x <= 0.0 ? 1.0 : 0.0; };
  p.jumps_ = {0.0};
  p.left_limit_ = 1.0;
  p.right_limit_ = 0.0;
  p.support_sup_ = 0.0;
  p.admissible_ = true;
  return p;
}

InitialProfile InitialProfile::from_staircase(const TestFunction& staircase) {
  if (staircase.kind() != TestFunction::Kind::staircase) {
    throw Error("from_staircase: test function must be a staircase");
  }
  InitialProfile p;
  const TestFunction f = staircase;
  p.phi_ = [f](double x) { return 1.0 - std::exp(-f(-x)); };
  for (const StairTerm& term : f.stair_terms()) p.jumps_.push_back(-term.threshold);
  std::sort(p.jumps_.begin(), p.jumps_.end());
  if (f.stair_terms().empty()) {
    p.left_limit_ = 0.0;
    p.support_sup_ = 0.0;
    p.admissible_ = false;
  } else {
    p.left_limit_ = 1.0 - std::exp(-f.stair_total());
    p.support_sup_ = -f.stair_min_threshold();
    p.admissible_ = true;
  }
  p.right_limit_ = 0.0;
  return p;
}

double InitialProfile::cell_average(double lo, double hi) const {
  if (!(hi > lo)) return phi_(lo);
  if (jumps_.empty()) return phi_(0.5 * (lo + hi));
  // phi is constant between jump locations: integrate piecewise exactly.
  std::vector<double> cuts = {lo};
  for (double j : jumps_) {
    if (j > lo && j < hi) cuts.push_back(j);
  }
  cuts.push_back(hi);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    acc += (cuts[i + 1] - cuts[i]) * phi_(0.5 * (cuts[i] + cuts[i + 1]));
  }
  return acc / (hi - lo);
}

InitialProfile InitialProfile::custom(std::function<double(double)> phi,
                                      double left_limit, double right_limit,
                                      double support_sup) {
  InitialProfile p;
  p.phi_ = std::move(phi);
  p.left_limit_ = left_limit;
  p.right_limit_ = right_limit;
  p.support_sup_ = support_sup;
  p.admissible_ = left_limit > 0.0 && std::isfinite(support_sup);
  return p;
}

InitialProfile InitialProfile::constant(double level) {
  if (level < 0.0 || level > 1.0) throw Error("constant profile must lie in [0, 1]");
  InitialProfile p;
  p.phi_ = [level](double) { return level; };
  p.left_limit_ = level;
  p.right_limit_ = level;
  p.support_sup_ = std::numeric_limits<double>::infinity();
  p.admissible_ = false;
  return p;
}

bool InitialProfile::admissible() const { return admissible_; }

FkppField solve_fkpp(const InitialProfile& phi, double t, FkppGridSpec grid) {
  if (!(t >= 0.0)) throw Error("solve_fkpp: t must be nonnegative");
  if (!(grid.dx > 0.0) || !(grid.dt > 0.0)) throw Error("solve_fkpp: bad grid spec");

  const double support = std::isfinite(phi.support_sup()) ? phi.support_sup() : 0.0;
  double x_lo = grid.x_lo.value_or(std::min(-20.0, support - 20.0));
  double x_hi = grid.x_hi.value_or(kSqrt2 * t + 40.0 + std::max(0.0, support));
  if (!(x_hi > x_lo)) throw Error("solve_fkpp: empty domain");

  const std::size_t n = static_cast<std::size_t>(std::ceil((x_hi - x_lo) / grid.dx)) + 1;
  FkppField field;
  field.x_lo = x_lo;
  field.dx = grid.dx;
  field.frame = Frame::fixed;
  field.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x_lo + grid.dx * static_cast<double>(i);
    field.u[i] =
        std::clamp(phi.cell_average(x - 0.5 * grid.dx, x + 0.5 * grid.dx), 0.0, 1.0);
  }

  std::size_t steps = static_cast<std::size_t>(std::llround(t / grid.dt));
  if (t > 0.0 && steps == 0) steps = 1;
  const double dt = steps > 0 ? t / static_cast<double>(steps) : grid.dt;
  const double eh = std::exp(0.5 * dt);
  const double r = dt / (4.0 * grid.dx * grid.dx);

  // Thomas algorithm workspace for (I - r D) u^{n+1} = (I + r D) u^n with
  // Dirichlet ends; the off-diagonal and diagonal are constant.
  std::vector<double> cp(n, 0.0), rhs(n, 0.0);
  const double diag = 1.0 + 2.0 * r;

  // Sentinel index 5 units inside the right boundary for the narrow-grid
  // check.
  const std::size_t guard =
      n > static_cast<std::size_t>(5.0 / grid.dx) + 2
          ? n - 1 - static_cast<std::size_t>(5.0 / grid.dx)
          : n - 1;

  for (std::size_t s = 0; s < steps; ++s) {
    for (double& v : field.u) v = logistic_flow(v, eh);

    if (n >= 3) {
      // rhs for interior nodes; ends stay Dirichlet at their current values.
      rhs[0] = field.u[0];
      rhs[n - 1] = field.u[n - 1];
      for (std::size_t i = 1; i + 1 < n; ++i) {
        rhs[i] = r * field.u[i - 1] + (1.0 - 2.0 * r) * field.u[i] + r * field.u[i + 1];
      }
      rhs[1] += r * field.u[0];
      // The right boundary enters through the back substitution below.
      // Forward sweep over interior.
      cp[1] = -r / diag;
      rhs[1] = rhs[1] / diag;
      for (std::size_t i = 2; i + 1 < n; ++i) {
        const double m = diag + r * cp[i - 1];
        cp[i] = -r / m;
        rhs[i] = (rhs[i] + r * rhs[i - 1]) / m;
      }
      for (std::size_t i = n - 2; i >= 1; --i) {
        field.u[i] = rhs[i] - cp[i] * field.u[i + 1];
        if (i == 1) break;
      }
    }

    for (double& v : field.u) v = logistic_flow(v, eh);

    for (double& v : field.u) {
      if (v < 0.0) {
        field.max_clamp = std::max(field.max_clamp, -v);
        ++field.clamp_events;
        v = 0.0;
      } else if (v > 1.0) {
        field.max_clamp = std::max(field.max_clamp, v - 1.0);
        ++field.clamp_events;
        v = 1.0;
      }
    }

    if ((s & 0x3F) == 0 && field.u[guard] > 1e-6 && phi.right_limit() <= 1e-12) {
      throw GridTooNarrow("solve_fkpp: front within 5 units of the right boundary");
    }
  }
  field.time = t;
  field.steps = steps;
  if (t > 0.0 && field.u[guard] > 1e-6 && phi.right_limit() <= 1e-12) {
    throw GridTooNarrow("solve_fkpp: front within 5 units of the right boundary");
  }
  return field;
}

DualityResult duality_check(const InitialProfile& phi, double t, double x, McConfig mc,
                            FkppGridSpec grid) {
  DualityResult out;
  if (t == 0.0) {
    out.pde = phi(x);
    out.mc = phi(x);
    return out;
  }
  FkppField field = solve_fkpp(phi, t, grid);
  out.pde = field.value_at(x);

  std::vector<double> products;
  products.reserve(static_cast<std::size_t>(mc.replicates));
  for (int rep = 0; rep < mc.replicates; ++rep) {
    EvolveConfig cfg;
    cfg.horizon = t;
    cfg.seed = Rng::stream(mc.seed, {static_cast<std::uint64_t>(rep)}).state();
    ParticleCloud cloud = simulate_bbm(cfg);
    double prod = 1.0;
    for (double chi : cloud.positions) {
      prod *= 1.0 - phi(x - chi);
      if (prod == 0.0) break;
    }
    products.push_back(prod);
  }
  const Summary s = summarize(products);
  out.mc = 1.0 - s.mean;
  out.se = s.se;
  return out;
}

std::vector<FrontPoint> front_trajectory(const std::vector<double>& t_grid,
                                         FkppGridSpec grid) {
  if (t_grid.empty()) throw Error("front_trajectory: empty time grid");
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    if (!(t_grid[i] < t_grid[i + 1])) throw Error("front_trajectory: grid not increasing");
  }
  const double t_max = t_grid.back();
  if (t_max > 200.0) throw Error("front_trajectory: t must not exceed 200");

  const InitialProfile phi = InitialProfile::heaviside();
  FkppGridSpec g = grid;
  if (!g.x_hi) g.x_hi = kSqrt2 * t_max + 40.0;
  if (!g.x_lo) g.x_lo = -20.0;

  // One sweep to t_max, harvesting crossings at the requested times.
  std::vector<FrontPoint> out;
  double t_prev = 0.0;
  FkppField field;
  bool first = true;
  for (double t : t_grid) {
    FkppGridSpec seg = g;
    if (first) {
      field = solve_fkpp(phi, t, seg);
      first = false;
    } else {
      // Continue from the stored state over [t_prev, t]; the snapshot nodes
      // coincide with the new grid nodes, so no resampling error enters.
      const double span = t - t_prev;
      std::size_t steps = static_cast<std::size_t>(std::llround(span / g.dt));
      if (steps == 0) steps = 1;
      InitialProfile frozen = InitialProfile::custom(
          [snapshot = field](double x) { return snapshot.value_at(x); },
          field.u.front(), field.u.back(), *g.x_hi);
      FkppGridSpec cont_grid = g;
      cont_grid.dt = span / static_cast<double>(steps);
      FkppField cont = solve_fkpp(frozen, span, cont_grid);
      cont.time = t;
      cont.clamp_events += field.clamp_events;
      cont.max_clamp = std::max(cont.max_clamp, field.max_clamp);
      field = std::move(cont);
    }
    t_prev = t;

    // Locate the half crossing by linear interpolation.
    const auto& u = field.u;
    std::size_t idx = u.size();
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
      if (u[i] >= 0.5 && u[i + 1] < 0.5) {
        idx = i;
        break;
      }
    }
    if (idx == u.size()) throw FrontLost("front_trajectory: no half-level crossing");
    const double frac = (u[idx] - 0.5) / (u[idx] - u[idx + 1]);
    out.push_back(FrontPoint{t, field.x_lo + field.dx * (static_cast<double>(idx) + frac)});
  }
  return out;
}

CofResult c_of_f(const TestFunction& staircase, double r, FkppGridSpec grid) {
  if (!(r > 0.0)) throw Error("c_of_f: r must be positive");
  const InitialProfile phi = InitialProfile::from_staircase(staircase);
  const double y_hi = kCofWindowHigh * std::sqrt(r);
  FkppGridSpec g = grid;
  if (!g.x_hi) g.x_hi = kSqrt2 * r + y_hi + 25.0 + std::max(0.0, phi.support_sup());
  FkppField field = solve_fkpp(phi, r, g);

  const double y_lo = kCofWindowLow * std::sqrt(r);
  // Trapezoid over grid nodes; the integrand is smooth and the field is only
  // second-order accurate anyway.
  CofResult out;
  const double base = kSqrt2 * r;
  const double y_max_grid = field.x_hi() - base - 5.0;
  double prev_y = 0.0;
  double prev_f = 0.0;
  for (double y = field.dx; y <= y_max_grid; y += field.dx) {
    const double u = field.value_at(base + y);
    const double f = u > 0.0 ? u * y * std::exp(kSqrt2 * y) : 0.0;
    const double panel = 0.5 * (prev_f + f) * (y - prev_y);
    const double mid = 0.5 * (prev_y + y);
    if (mid < y_lo) {
      out.below_window += panel;
    } else if (mid > y_hi) {
      out.above_window += panel;
    } else {
      out.value += panel;
    }
    prev_y = y;
    prev_f = f;
  }
  out.value *= kSqrt2OverPi;
  out.below_window *= kSqrt2OverPi;
  out.above_window *= kSqrt2OverPi;
  return out;
}

bool c_of_f_stable(const TestFunction& staircase, double r, double rel_tol,
                   FkppGridSpec grid) {
  const double a = c_of_f(staircase, r, grid).value;
  const double b = c_of_f(staircase, 2.0 * r, grid).value;
  return std::fabs(a - b) <= rel_tol * std::max(std::fabs(a), std::fabs(b));
}

double psi_value(const FkppField& u_r, double r, double t, double X) {
  if (!(t > r) || !(r > 0.0)) throw Error("psi_value: need t > r > 0");
  if (t < 8.0 * r || X < 8.0 * r - 3.0 / (2.0 * kSqrt2) * std::log(t)) {
    throw OutOfValidityWindow("psi_value: (t, X) outside the validity window");
  }
  const double span = t - r;
  const double base = kSqrt2 * r;
  const double decay_scale = 3.0 / (2.0 * kSqrt2) * std::log(t);
  const auto integrand = [&](double y) {
    const double u = u_r.value_at(base + y);
    if (u <= 0.0) return 0.0;
    const double expo = kSqrt2 * y - (y - X) * (y - X) / (2.0 * span);
    const double bracket = 1.0 - std::exp(-2.0 * y * (X + decay_scale) / span);
    return u * std::exp(expo) * bracket;
  };
  const double y_max = kCofWindowHigh * std::sqrt(r) + std::fabs(X) + 10.0 * std::sqrt(span);
  const double integral = integrate(integrand, 0.0, y_max, 1e-8).value;
  return std::exp(-kSqrt2 * X) / std::sqrt(2.0 * M_PI * span) * integral;
}

double laplace_functional(const PointMeasure& eta, const TestFunction& staircase,
                          double t, FkppGridSpec grid) {
  if (eta.empty()) throw EmptyMeasure("laplace_functional: empty measure");
  if (staircase.kind() != TestFunction::Kind::staircase) {
    throw Error("laplace_functional: f must be a staircase");
  }
  if (staircase.stair_terms().empty()) return 1.0;  // f = 0

  const InitialProfile phi = InitialProfile::from_staircase(staircase);
  const double x_hat_max = -eta.atoms().back().position;   // deepest atom reflected
  const double x_hat_min = -eta.atoms().front().position;  // from max eta
  FkppGridSpec g = grid;
  const double base = kSqrt2 * t;
  if (!g.x_lo) g.x_lo = std::min(-20.0, base + x_hat_min - 10.0);
  if (!g.x_hi) {
    g.x_hi = base + std::max(0.0, x_hat_max) + 15.0 + std::max(0.0, phi.support_sup());
  }
  FkppField field = solve_fkpp(phi, t, g);

  double log_sum = 0.0;
  for (const Atom& a : eta.atoms()) {
    const double u = field.value_at(base - a.position);
    if (u >= 1.0) throw SingularLog("laplace_functional: u = 1 at an atom");
    log_sum += a.multiplicity * std::log1p(-u);
  }
  return std::exp(log_sum);
}

TravelingWave traveling_wave(const FkppField& u_m, double half_window) {
  if (!(u_m.time > 0.0)) throw Error("traveling_wave: field at t = 0");
  TravelingWave wave;
  wave.t = u_m.time;
  const double center = m_of_t(u_m.time);
  const double h = u_m.dx;
  for (double x = -half_window; x <= half_window + 1e-12; x += h) {
    wave.x.push_back(x);
    wave.omega.push_back(u_m.value_at(center + x));
  }
  for (std::size_t i = 1; i + 1 < wave.omega.size(); ++i) {
    const double w = wave.omega[i];
    const double d1 = (wave.omega[i + 1] - wave.omega[i - 1]) / (2.0 * h);
    const double d2 = (wave.omega[i + 1] - 2.0 * w + wave.omega[i - 1]) / (h * h);
    const double residual = 0.5 * d2 + kSqrt2 * d1 + w - w * w;
    wave.ode_residual = std::max(wave.ode_residual, std::fabs(residual));
  }
  return wave;
}

FkppField with_frame(const FkppField& field, Frame frame) {
  FkppField out = field;
  if (frame == out.frame) return out;
  const double shift = kSqrt2 * field.time;
  out.x_lo = frame == Frame::moving_sqrt2 ? field.x_lo - shift : field.x_lo + shift;
  out.frame = frame;
  return out;
}

void write_field_csv(const FkppField& field, const std::string& path) {
  std::vector<std::vector<double>> rows;
  rows.reserve(field.u.size());
  for (std::size_t i = 0; i < field.u.size(); ++i) {
    rows.push_back({field.x_lo + field.dx * static_cast<double>(i), field.u[i]});
  }
  write_csv(path, {"x", "u"}, rows);
}

TailBoundAudit tail_bound_audit(double t, FkppGridSpec grid) {
  if (!(t >= 50.0)) throw Error("tail_bound_audit: t must be at least 50");
  const double x_max = 3.0 * std::sqrt(t);
  FkppGridSpec g = grid;
  if (!g.x_hi) g.x_hi = kSqrt2 * t + x_max + 25.0;
  FkppField field = solve_fkpp(InitialProfile::heaviside(), t, g);

  TailBoundAudit audit;
  audit.t = t;
  const double base = kSqrt2 * t;
  const double logt = std::log(t);
  const double t32 = std::pow(t, 1.5);
  double c1 = 0.0;
  double c2 = std::numeric_limits<double>::infinity();
  for (double x = 0.0; x <= x_max; x += 0.25) {
    const double u = field.value_at(base + x);
    audit.x.push_back(x);
    audit.u.push_back(u);
    const double upper_env = (x + logt) / t32 * std::exp(-kSqrt2 * x - x * x / (2.0 * t));
    const double lower_env = (x + logt) / t32 * std::exp(-kSqrt2 * x - x * x / t);
    if (upper_env > 0.0) c1 = std::max(c1, u / upper_env);
    if (lower_env > 0.0) c2 = std::min(c2, u / lower_env);
    if (x >= std::sqrt(t) && x <= 2.0 * std::sqrt(t)) {
      audit.mid_ratio.push_back(u / (x / t32 * std::exp(-kSqrt2 * x)));
    }
  }
  audit.c1 = c1;
  audit.c2 = c2;
  return audit;
}

}  // namespace bbm
