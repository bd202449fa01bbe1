#include "bbm/point_measure.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "bbm/errors.hpp"

namespace bbm {

bool operator==(const Atom& a, const Atom& b) {
  return a.position == b.position && a.multiplicity == b.multiplicity;
}

namespace {

void validate_multiplicity(double m) {
  if (!std::isfinite(m)) throw Overflow("atom multiplicity is not finite");
  if (m < 1.0) throw Error("atom multiplicity must be >= 1");
  if (m < 0x1p53 && m != std::floor(m)) {
    throw Error("atom multiplicity must be integer-valued");
  }
}

void require_nonempty(const PointMeasure& eta, const char* op) {
  if (eta.empty()) throw EmptyMeasure(std::string(op) + ": empty measure");
}

}  // namespace

PointMeasure PointMeasure::from_atoms(std::vector<Atom> atoms) {
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.position)) throw Error("atom position is not finite");
    validate_multiplicity(a.multiplicity);
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.position > b.position; });
  // Merge only bit-identical positions; no epsilon tolerance, so results are
  // deterministic regardless of how the atom list was assembled.
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().position == a.position) {
      merged.back().multiplicity += a.multiplicity;
    } else {
      merged.push_back(a);
    }
  }
  PointMeasure out;
  out.atoms_ = std::move(merged);
  return out;
}

PointMeasure PointMeasure::delta(double position, double multiplicity) {
  return from_atoms({Atom{position, multiplicity}});
}

double PointMeasure::total_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.multiplicity;
  return m;
}

// ---------------------------------------------------------------------------
// TestFunction
// ---------------------------------------------------------------------------

TestFunction TestFunction::alpha(int k) {
  if (k < 1) throw Error("alpha: k must be >= 1");
  TestFunction f;
  f.kind_ = Kind::alpha;
  f.alpha_k_ = k;
  return f;
}

TestFunction TestFunction::tent(double center, double halfwidth) {
  if (!(halfwidth > 0.0)) throw Error("tent: halfwidth must be positive");
  TestFunction f;
  f.kind_ = Kind::tent;
  f.a_ = center;
  f.b_ = halfwidth;
  return f;
}

TestFunction TestFunction::step_hab(double a, double b) {
  if (!(b > a)) throw Error("step_hab: requires a < b");
  TestFunction f;
  f.kind_ = Kind::step_hab;
  f.a_ = a;
  f.b_ = b;
  return f;
}

TestFunction TestFunction::indicator_geq(double b) {
  TestFunction f;
  f.kind_ = Kind::indicator_geq;
  f.a_ = b;
  return f;
}

TestFunction TestFunction::staircase(std::vector<StairTerm> terms) {
  for (const StairTerm& t : terms) {
    if (!(t.coeff > 0.0)) throw Error("staircase: coefficients must be positive");
  }
  TestFunction f;
  f.kind_ = Kind::staircase;
  f.terms_ = std::move(terms);
  return f;
}

TestFunction TestFunction::custom(std::function<double(double)> fn, double decay_lambda) {
  if (!(decay_lambda > 0.0)) throw Error("custom: declare a positive decay rate");
  TestFunction f;
  f.kind_ = Kind::custom;
  f.fn_ = std::move(fn);
  f.decay_lambda_ = decay_lambda;
  return f;
}

double TestFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::alpha: {
      if (x >= 0.0) return 0.0;
      const double k = static_cast<double>(alpha_k_);
      if (x <= -1.0) return std::exp(-x * x / k);
      return -std::exp(-1.0 / k) * x;
    }
    case Kind::tent: {
      const double d = std::fabs(x - a_) / b_;
      return d >= 1.0 ? 0.0 : 1.0 - d;
    }
    case Kind::step_hab: {
      if (x <= a_) return 0.0;
      if (x >= b_) return 1.0;
      return (x - a_) / (b_ - a_);
    }
    case Kind::indicator_geq:
      return x >= a_ ? 1.0 : 0.0;
    case Kind::staircase: {
      double v = 0.0;
      for (const StairTerm& t : terms_) {
        if (x >= t.threshold) v += t.coeff;
      }
      return v;
    }
    case Kind::custom:
      return fn_(x);
  }
  return 0.0;
}

double TestFunction::stair_total() const {
  if (kind_ != Kind::staircase) throw Error("stair_total: not a staircase");
  double s = 0.0;
  for (const StairTerm& t : terms_) s += t.coeff;
  return s;
}

double TestFunction::stair_min_threshold() const {
  if (kind_ != Kind::staircase || terms_.empty()) {
    throw Error("stair_min_threshold: empty or non-staircase");
  }
  double m = terms_.front().threshold;
  for (const StairTerm& t : terms_) m = std::min(m, t.threshold);
  return m;
}

// ---------------------------------------------------------------------------
// IntensityDescriptor
// ---------------------------------------------------------------------------

const char* to_string(Membership m) {
  switch (m) {
    case Membership::member: return "member";
    case Membership::nonmember: return "nonmember";
    default: return "undecided";
  }
}

IntensityDescriptor IntensityDescriptor::abk() {
  IntensityDescriptor d;
  d.kind = Kind::abk;
  d.tail_exponent = 1.0;
  return d;
}

IntensityDescriptor IntensityDescriptor::modulated(double alpha, double beta) {
  if (alpha < 0.0 || alpha > 1.0) throw Error("modulated: alpha must be in [0, 1]");
  if (!(beta > 0.0) || beta > 1.0) throw Error("modulated: beta must be in (0, 1]");
  IntensityDescriptor d;
  d.kind = Kind::modulated;
  d.alpha = alpha;
  d.beta = beta;
  d.tail_exponent = 1.0;
  return d;
}

IntensityDescriptor IntensityDescriptor::power_exp(double p) {
  if (!(p > 0.0)) throw Error("power_exp: exponent must be positive");
  IntensityDescriptor d;
  d.kind = Kind::power_exp;
  d.power = p;
  d.tail_exponent = p;
  return d;
}

IntensityDescriptor IntensityDescriptor::lattice() {
  IntensityDescriptor d;
  d.kind = Kind::lattice;
  d.tail_exponent = 1.0;
  return d;
}

IntensityDescriptor IntensityDescriptor::custom(std::optional<double> declared) {
  IntensityDescriptor d;
  d.kind = Kind::custom;
  d.tail_exponent = declared;
  return d;
}

double IntensityDescriptor::density(double x) const {
  if (x >= 0.0) return 0.0;
  constexpr double kSqrt2OverPi = 0.79788456080286535588;
  switch (kind) {
    case Kind::abk:
      return kSqrt2OverPi * (-x) * std::exp(-std::sqrt(2.0) * x);
    case Kind::modulated:
      return kSqrt2OverPi * (-x) * (1.0 + alpha * std::cos(std::pow(-x, beta))) *
             std::exp(-std::sqrt(2.0) * x);
    case Kind::power_exp:
      return std::exp(std::pow(-x, power));
    default:
      throw Error("density: descriptor has no Lebesgue density");
  }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

double integrate(const TestFunction& f, const PointMeasure& eta) {
  require_nonempty(eta, "integrate");
  double acc = 0.0;
  for (const Atom& a : eta.atoms()) acc += a.multiplicity * f(a.position);
  return acc;
}

double max_point(const PointMeasure& eta) {
  require_nonempty(eta, "max_point");
  return eta.atoms().front().position;
}

PointMeasure reflect(const PointMeasure& eta) {
  require_nonempty(eta, "reflect");
  std::vector<Atom> atoms = eta.atoms();
  for (Atom& a : atoms) a.position = -a.position;
  return PointMeasure::from_atoms(std::move(atoms));
}

PointMeasure translate(const PointMeasure& eta, double a) {
  require_nonempty(eta, "translate");
  std::vector<Atom> atoms = eta.atoms();
  for (Atom& atom : atoms) atom.position += a;
  return PointMeasure::from_atoms(std::move(atoms));
}

PointMeasure superpose(const PointMeasure& a, const PointMeasure& b) {
  std::vector<Atom> atoms = a.atoms();
  atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());
  return PointMeasure::from_atoms(std::move(atoms));
}

double mass_geq(const PointMeasure& eta, double b) {
  double m = 0.0;
  for (const Atom& a : eta.atoms()) {
    if (a.position < b) break;  // atoms are sorted descending
    m += a.multiplicity;
  }
  return m;
}

double mass_between(const PointMeasure& eta, double lo, double hi) {
  double m = 0.0;
  for (const Atom& a : eta.atoms()) {
    if (a.position < lo) break;
    if (a.position <= hi) m += a.multiplicity;
  }
  return m;
}

TestFunction d2_test_function(int k) {
  if (k < 1) throw Error("d2_test_function: k must be >= 1");
  // Cantor-diagonal walk over (center index j, width index m).
  int k0 = k - 1;
  int diag = 0;
  while (k0 >= diag + 1) {
    k0 -= diag + 1;
    ++diag;
  }
  const int j = k0;
  const int m = diag - k0;
  // Center enumeration: 0, +1/2, -1/2, +1, -1, +3/2, ...
  const double center = (j == 0) ? 0.0
                                 : ((j % 2 == 1) ? 0.5 * ((j + 1) / 2)
                                                 : -0.5 * (j / 2));
  const double width = std::ldexp(1.0, -m);
  return TestFunction::tent(center, width);
}

D2Result d2_distance(const PointMeasure& eta1, const PointMeasure& eta2,
                     int truncation_index) {
  require_nonempty(eta1, "d2_distance");
  require_nonempty(eta2, "d2_distance");
  if (truncation_index < 1) throw Error("d2_distance: truncation index must be >= 1");

  double value = std::fabs(max_point(eta1) - max_point(eta2));
  double weight = 1.0;
  for (int k = 1; k <= truncation_index; ++k) {
    weight *= 0.5;
    const TestFunction h = d2_test_function(k);
    const TestFunction a = TestFunction::alpha(k);
    const double dh = std::fabs(integrate(h, eta1) - integrate(h, eta2));
    const double da = std::fabs(integrate(a, eta1) - integrate(a, eta2));
    value += weight * (std::min(dh, 1.0) + std::min(da, 1.0));
  }
  D2Result r;
  r.value = value;
  r.truncation_bound = 2.0 * weight;  // each truncated series tail is <= 2^-K
  return r;
}

Membership m2_membership(const IntensityDescriptor& d) {
  if (!d.tail_exponent.has_value()) return Membership::undecided;
  // Mass on [0, infinity) vanishes for every library descriptor (support in
  // the negative half-line), so membership reduces to sub-quadratic growth
  // of the log-density toward -infinity.
  return *d.tail_exponent < 2.0 ? Membership::member : Membership::nonmember;
}

Membership m2_membership(const PointMeasure& eta) {
  // A finite nonempty atom list has finite mass everywhere and trivially
  // sub-quadratic tail growth.
  return eta.empty() ? Membership::nonmember : Membership::member;
}

}  // namespace bbm
