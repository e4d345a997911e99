#include "lzc/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace lzc::quad {
namespace {

constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi;
  Complex value;
  double err;
  double roundoff;
  double l1;
  bool operator<(const Segment& other) const { return err < other.err; }
};

Segment rule(const std::function<Complex(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const Complex fc = f(center);
  Complex kronrod = fc * kKronrodWeights[7];
  Complex gauss = fc * kGaussWeights[3];
  double scale = std::abs(fc) * kKronrodWeights[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const Complex f1 = f(center - dx);
    const Complex f2 = f(center + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    scale += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  kronrod *= half;
  gauss *= half;
  const double roundoff =
      50.0 * std::numeric_limits<double>::epsilon() * std::abs(half) * scale;
  const double l1 = std::abs(half) * scale;
  return {lo, hi, kronrod, std::abs(kronrod - gauss) + roundoff, roundoff, l1};
}

}  // namespace

QuadResult integrate(const std::function<Complex(double)>& f, double lo,
                     double hi, const Tolerance& tol) {
  QuadResult out;
  if (lo == hi) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> heap;
  Segment first = rule(f, lo, hi);
  Complex total = first.value;
  double total_err = first.err;
  double total_roundoff = first.roundoff;
  heap.push(first);
  int intervals = 1;
  auto target = [&] { return std::max(tol.abs, tol.rel * std::abs(total)); };
  // Once the truncation part is below the rounding floor, bisection cannot help.
  auto at_floor = [&] { return total_err <= 2.0 * total_roundoff; };

  while (total_err > target() && !at_floor() && intervals < tol.max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid == worst.lo || mid == worst.hi) {
      // Interval no longer divisible in double precision; keep it as is.
      heap.push(worst);
      break;
    }
    Segment left = rule(f, worst.lo, mid);
    Segment right = rule(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    total_roundoff += left.roundoff + right.roundoff - worst.roundoff;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }

  const bool floor_reached = at_floor();

  // Re-sum to shed the drift accumulated by the incremental updates.
  total = 0.0;
  total_err = 0.0;
  total_roundoff = 0.0;
  double l1 = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().err;
    total_roundoff += heap.top().roundoff;
    l1 += heap.top().l1;
    heap.pop();
  }
  out.value = total;
  out.abs_err = total_err;
  out.l1_norm = l1;
  out.intervals = intervals;
  out.rounding_limited = total_err > target() && floor_reached;
  out.converged = total_err <= target() || floor_reached;
  return out;
}

}  // namespace lzc::quad
