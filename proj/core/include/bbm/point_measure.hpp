#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace bbm {

// ---------------------------------------------------------------------------
// PointMeasure
// ---------------------------------------------------------------------------

struct Atom {
  double position = 0.0;
  // Integer-valued by contract. Stored as binary64 because lattice initial
  // conditions reach multiplicities of order e^{sqrt(2) L}, far past any
  // 64-bit integer; values above 2^53 are meaningful as magnitudes only.
  double multiplicity = 1.0;
};

// Finite integer-valued point measure, atoms sorted by strictly decreasing
// position. The default-constructed (empty) measure exists so constructor
// misuse fails loudly: every operation below rejects it.
class PointMeasure {
 public:
  PointMeasure() = default;

  // Sorts descending, merges atoms with bit-identical positions (summing
  // multiplicities), validates multiplicities >= 1 and integer-valued.
  static PointMeasure from_atoms(std::vector<Atom> atoms);
  static PointMeasure delta(double position, double multiplicity = 1.0);

  bool empty() const { return atoms_.empty(); }
  std::size_t atom_count() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const;

  bool operator==(const PointMeasure& other) const { return atoms_ == other.atoms_; }

 private:
  std::vector<Atom> atoms_;
};

bool operator==(const Atom& a, const Atom& b);

// ---------------------------------------------------------------------------
// Test functions
// ---------------------------------------------------------------------------

struct StairTerm {
  double coeff = 1.0;      // c_k > 0
  double threshold = 0.0;  // b_k; term is c_k 1_{x >= b_k}
};

// Nonnegative test functions integrated against point measures. The alpha
// family is the super-gaussian family entering the d2 metric:
//   alpha_k(x) = e^{-x^2/k} for x <= -1, -e^{-1/k} x on (-1, 0), 0 for x >= 0.
class TestFunction {
 public:
  enum class Kind { alpha, tent, step_hab, indicator_geq, staircase, custom };

  static TestFunction alpha(int k);
  static TestFunction tent(double center, double halfwidth);
  // h_{a,b}: 0 below a, linear ramp on [a, b], 1 above b.
  static TestFunction step_hab(double a, double b);
  static TestFunction indicator_geq(double b);
  static TestFunction staircase(std::vector<StairTerm> terms);
  static TestFunction zero_staircase() { return staircase({}); }
  static TestFunction custom(std::function<double(double)> f, double decay_lambda);

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  const std::vector<StairTerm>& stair_terms() const { return terms_; }
  // Total height sum c_k (staircase only).
  double stair_total() const;
  // Smallest threshold min b_k (staircase only; requires nonempty).
  double stair_min_threshold() const;
  double decay_rate() const { return decay_lambda_; }

 private:
  Kind kind_ = Kind::indicator_geq;
  int alpha_k_ = 1;
  double a_ = 0.0, b_ = 0.0;  // tent center/halfwidth or ramp ends or threshold
  std::vector<StairTerm> terms_;
  std::function<double(double)> fn_;
  double decay_lambda_ = 0.0;
};

// ---------------------------------------------------------------------------
// Intensity descriptors (symbolic, for membership rules and oracles)
// ---------------------------------------------------------------------------

enum class Membership { member, nonmember, undecided };
const char* to_string(Membership m);

// Symbolic description of an intensity measure supported on (-inf, 0].
// density(x) is the Lebesgue density where one exists; tail_exponent is the
// growth order q of log(density) ~ |x|^q as x -> -infinity.
struct IntensityDescriptor {
  enum class Kind { abk, modulated, power_exp, lattice, custom };

  Kind kind = Kind::abk;
  double alpha = 0.0;  // modulated: 1 + alpha cos(|x|^beta) factor
  double beta = 1.0;
  double power = 1.0;  // power_exp: density e^{|x|^p} 1_{x<0}
  std::optional<double> tail_exponent;

  static IntensityDescriptor abk();
  static IntensityDescriptor modulated(double alpha, double beta);
  static IntensityDescriptor power_exp(double p);
  static IntensityDescriptor lattice();
  static IntensityDescriptor custom(std::optional<double> declared_tail_exponent);

  double density(double x) const;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// <f, eta> = sum multiplicity * f(position). Throws EmptyMeasure.
double integrate(const TestFunction& f, const PointMeasure& eta);

// Largest atom position. Throws EmptyMeasure.
double max_point(const PointMeasure& eta);

// eta-hat: atom positions negated. Involution. Throws EmptyMeasure.
PointMeasure reflect(const PointMeasure& eta);

// T_a eta: every atom shifted by a.
PointMeasure translate(const PointMeasure& eta, double a);

// eta1 + eta2 as measures.
PointMeasure superpose(const PointMeasure& a, const PointMeasure& b);

// Count eta([b, infinity)).
double mass_geq(const PointMeasure& eta, double b);
// Count eta([lo, hi]).
double mass_between(const PointMeasure& eta, double lo, double hi);

struct D2Result {
  double value = 0.0;
  // Bound on the omitted tails of the two truncated series.
  double truncation_bound = 0.0;
};

// d2(eta1, eta2) = d(eta1, eta2) + |max eta1 - max eta2|
//                + sum_k 2^{-k} (|<alpha_k, eta1> - <alpha_k, eta2>| ^ 1),
// with the vague part d built from a fixed tent-function enumeration (see
// d2_test_function). Both series truncated at index K.
D2Result d2_distance(const PointMeasure& eta1, const PointMeasure& eta2,
                     int truncation_index = 60);

// The k-th (k >= 1) tent function of the vague-metric enumeration: the pair
// (center, width) walks the Cantor diagonal over centers {0, 1/2, -1/2, 1,
// -1, ...} and halfwidths {1, 1/2, 1/4, ...}.
TestFunction d2_test_function(int k);

Membership m2_membership(const IntensityDescriptor& d);
Membership m2_membership(const PointMeasure& eta);

}  // namespace bbm
