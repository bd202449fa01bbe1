#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace bbm {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;

  operator double() const { return value; }
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair (standard QUADPACK constants).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
void gk15(const F& f, double a, double b, double& kronrod, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  kronrod = resk * h;
  err = std::fabs((resk - resg) * h);
}

struct Panel {
  double a, b, value, error;
};

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration over [a, b]: the panel with
// the largest error estimate is bisected until the accumulated error drops
// below rel_tol * |integral| + abs_tol or the panel budget runs out. Robust
// against integrands whose support is a narrow bump inside a wide interval
// and against non-finite integrand values (the error becomes infinite and
// the budget bounds the work).
template <typename F>
QuadResult integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 0.0, std::size_t max_panels = 4000) {
  QuadResult out;
  if (a == b) return out;

  const auto eval_panel = [&](double lo, double hi) {
    detail::Panel p{lo, hi, 0.0, 0.0};
    detail::gk15(f, lo, hi, p.value, p.error);
    out.evaluations += 15;
    if (!std::isfinite(p.value) || !std::isfinite(p.error)) {
      p.error = std::numeric_limits<double>::infinity();
    }
    return p;
  };
  const auto by_error = [](const detail::Panel& x, const detail::Panel& y) {
    return x.error < y.error;
  };

  // Seed with several panels so localized features are seen early.
  constexpr int kSeedPanels = 8;
  std::vector<detail::Panel> heap;
  heap.reserve(64);
  for (int i = 0; i < kSeedPanels; ++i) {
    heap.push_back(eval_panel(a + (b - a) * i / double(kSeedPanels),
                              a + (b - a) * (i + 1) / double(kSeedPanels)));
    std::push_heap(heap.begin(), heap.end(), by_error);
  }

  double settled_value = 0.0;  // panels that can no longer be refined
  double settled_error = 0.0;
  for (;;) {
    double total = settled_value, total_err = settled_error;
    for (const auto& p : heap) {
      total += p.value;
      total_err += p.error;
    }
    const double tol = std::fmax(rel_tol * std::fabs(total), abs_tol) + 1e-305;
    out.value = total;
    out.error_estimate = total_err;
    out.converged = !(total_err > tol);
    if (out.converged || heap.empty() || heap.size() >= max_panels) break;

    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::Panel worst = heap.back();
    heap.pop_back();
    if (worst.b - worst.a <= std::fabs(worst.a) * 1e-14 + 1e-300) {
      // Width limit reached; retire the panel so the loop always progresses.
      settled_value += worst.value;
      settled_error += worst.error;
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    heap.push_back(eval_panel(worst.a, mid));
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(eval_panel(mid, worst.b));
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  return out;
}

}  // namespace bbm
