#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

namespace freeconv::quad {

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class Func>
Panel<T> gk15(const Func& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const T sum = f(c - dx) + f(c + dx);
    kronrod += sum * kWgk[j];
    if (j % 2 == 1) gauss += sum * kWg[j / 2];
  }
  return {a, b, kronrod * h, magnitude((kronrod - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b]. The panel
/// with the largest error estimate is bisected until the summed estimate is
/// below max(abs_tol, rel_tol * |I|) or `max_panels` is hit.
template <class T, class Func>
Result<T> integrate(const Func& f, double a, double b, double abs_tol = 1e-9, double rel_tol = 1e-10,
                    int max_panels = 2000) {
  using detail::Panel;
  std::priority_queue<Panel<T>> heap;
  heap.push(detail::gk15<T>(f, a, b));
  T total = heap.top().value;
  double err = heap.top().error;
  int panels = 1;
  while (err > std::max(abs_tol, rel_tol * detail::magnitude(total)) && panels < max_panels) {
    const Panel<T> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // interval exhausted
      heap.push(worst);
      break;
    }
    const Panel<T> left = detail::gk15<T>(f, worst.a, mid);
    const Panel<T> right = detail::gk15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  T sum{};
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  Result<T> r;
  r.value = sum;
  r.error = esum;
  r.evaluations = 15 * (2 * panels - 1);
  r.converged = esum <= std::max(abs_tol, rel_tol * detail::magnitude(sum));
  return r;
}

}  // namespace freeconv::quad
