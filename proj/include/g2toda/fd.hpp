#pragma once

#include <cmath>
#include <utility>

namespace g2toda {

// eighth-order central second derivative; returns the value at step h/2 and
// the Richardson difference against step h
template <class T, class F>
std::pair<T, T> second_derivative(F&& f, T t, T h) {
  static const int num[5] = {-205, 8, -1, 8, -1};
  static const int den[5] = {72, 5, 5, 315, 560};
  T c[5];
  for (int k = 0; k < 5; ++k) c[k] = T(num[k]) / T(den[k]);
  auto stencil = [&](T step, T f0) {
    T acc = c[0] * f0;
    for (int k = 1; k <= 4; ++k) acc += c[k] * (f(t + T(k) * step) + f(t - T(k) * step));
    return acc / (step * step);
  };
  const T f0 = f(t);
  const T coarse = stencil(h, f0);
  const T fine = stencil(h / 2, f0);
  using std::abs;
  return {fine, abs(fine - coarse)};
}

}  // namespace g2toda
