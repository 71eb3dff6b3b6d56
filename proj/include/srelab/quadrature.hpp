#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature.  Infinite upper limits are
// integrated over geometrically growing windows; divergence is declared when
// doubling the cutoff keeps changing the running value by more than 1%.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "srelab/error.hpp"

namespace srelab::quad {

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  bool diverged = false;
};

namespace detail {

// QUADPACK G7,K15 nodes and weights on [-1,1].
inline constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kWeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kWeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
  double a, b, value, err;
};

template <class F>
Panel eval_panel(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double k = 0.0, g = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double x = kNodes[i] * h;
    const double fv = (i == 7) ? f(c) : f(c - x) + f(c + x);
    k += kWeightsK[i] * fv;
    if (i % 2 == 1) g += kWeightsG[i / 2] * fv;
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = k * h;
  const double diff = std::fabs((k - g) * h);
  p.err = std::min(diff, std::pow(200.0 * diff, 1.5));
  if (!std::isfinite(p.value)) p.err = std::numeric_limits<double>::infinity();
  return p;
}

}  // namespace detail

// Adaptive integration over a finite interval.
template <class F>
QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-12,
                     int max_panels = 4000) {
  if (!(a <= b)) throw DomainError("integrate: empty interval");
  QuadResult res;
  if (a == b) return res;
  std::vector<detail::Panel> heap{detail::eval_panel(f, a, b)};
  auto err_less = [](const detail::Panel& x, const detail::Panel& y) {
    return x.err < y.err;
  };
  std::make_heap(heap.begin(), heap.end(), err_less);
  double total_err = heap.front().err;
  while (total_err > abs_tol && static_cast<int>(heap.size()) < max_panels) {
    std::pop_heap(heap.begin(), heap.end(), err_less);
    detail::Panel worst = heap.back();
    heap.pop_back();
    if (worst.b - worst.a < 1e-15 * std::max(1.0, std::fabs(worst.a))) {
      // Interval exhausted; keep its contribution as-is.
      worst.err = 0.0;
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), err_less);
      break;
    }
    const double m = 0.5 * (worst.a + worst.b);
    for (detail::Panel p :
         {detail::eval_panel(f, worst.a, m), detail::eval_panel(f, m, worst.b)}) {
      heap.push_back(p);
      std::push_heap(heap.begin(), heap.end(), err_less);
    }
    total_err = 0.0;
    for (const auto& p : heap) total_err += p.err;
  }
  for (const auto& p : heap) {
    res.value += p.value;
    res.abs_err += p.err;
  }
  if (!std::isfinite(res.value)) throw NumericError("integrate: non-finite value");
  return res;
}

// Integration over [a, infinity).  Windows [T_k, T_{k+1}] double in width;
// returns diverged=true if doubling the cutoff still changes the value by
// more than 1% when the window budget is exhausted.
template <class F>
QuadResult integrate_to_inf(const F& f, double a, double abs_tol = 1e-12,
                            double first_width = 1.0, int max_windows = 70) {
  QuadResult res;
  double lo = a;
  double width = first_width;
  double last_contrib = std::numeric_limits<double>::infinity();
  int quiet = 0;
  for (int k = 0; k < max_windows; ++k) {
    const double hi = lo + width;
    QuadResult w = integrate(f, lo, hi, abs_tol);
    res.value += w.value;
    res.abs_err += w.abs_err;
    const double contrib = std::fabs(w.value);
    if (contrib <= std::max(abs_tol, 1e-16 * std::fabs(res.value))) {
      ++quiet;
      if (quiet >= 2) return res;
    } else {
      quiet = 0;
    }
    last_contrib = contrib;
    lo = hi;
    width *= 2.0;
  }
  // Window budget exhausted: diverged if the tail still moves the total.
  res.diverged = last_contrib > 0.01 * std::fabs(res.value) ||
                 !std::isfinite(res.value);
  if (!res.diverged) res.abs_err += last_contrib;
  return res;
}

}  // namespace srelab::quad
