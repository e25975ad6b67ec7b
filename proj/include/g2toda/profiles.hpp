#pragma once

#include <array>
#include <cmath>

#include "g2toda/params.hpp"

namespace g2toda {

struct ScaleConstants {
  std::array<double, 7> lambda;
  std::array<double, 7> log_lambda;
};

ScaleConstants scale_constants(const TodaParams& p);

// lambda_0..lambda_6 together with mu1, mu2 in a working precision T
template <class T>
struct Lambdas {
  std::array<T, 7> l;
  T m1, m2;
  int M1, M2;
};

template <class T>
Lambdas<T> make_lambdas(const TodaParams& p) {
  using std::exp;
  using std::log;
  Lambdas<T> L;
  L.M1 = p.mu1();
  L.M2 = p.mu2();
  const T m1 = L.m1 = T(L.M1);
  const T m2 = L.m2 = T(L.M2);
  const T ln2 = log(T(2));
  const T ll4 = log(T(p.lambda4)), ll5 = log(T(p.lambda5));
  const T a = T(10.5) * ln2 + 2 * log(m1) + log(m2) + 2 * log(m1 + m2) + 2 * log(2 * m1 + m2) +
              log(3 * m1 + m2) + log(3 * m1 + 2 * m2);
  const T b = 7 * ln2 + log(m1) + log(m2) + 2 * log(m1 + m2) + log(2 * m1 + m2) + log(3 * m1 + 2 * m2);
  const T c = 7 * ln2 + 2 * log(m1) + log(m2) + log(m1 + m2) + log(2 * m1 + m2) + log(3 * m1 + m2);
  const T d = 3 * ln2 + log(m1) + log(m1 + m2) + log(2 * m1 + m2);
  const T e = T(3.5) * ln2 + log(m1) + log(m2) + log(m1 + m2);
  const std::array<T, 7> lg = {-2 * a - ll4 - ll5, -2 * b - ll5, -2 * c - ll4, -2 * d, ll4, ll5, 2 * e + ll4 + ll5};
  for (int i = 0; i < 7; ++i) L.l[i] = (i == 4 ? T(p.lambda4) : i == 5 ? T(p.lambda5) : exp(lg[i]));
  return L;
}

template <class T>
T rho1_inv(const Lambdas<T>& L, T r) {
  const int a = L.M1, b = L.M2;
  const auto& l = L.l;
  return l[0] + l[1] * ipow(r, 2 * a) + l[2] * ipow(r, 2 * (a + b)) + l[3] * ipow(r, 2 * (2 * a + b)) +
         l[4] * ipow(r, 2 * (3 * a + b)) + l[5] * ipow(r, 2 * (3 * a + 2 * b)) + l[6] * ipow(r, 2 * (4 * a + 2 * b));
}

template <class T>
T rho2_inv(const Lambdas<T>& L, T r) {
  const int A = L.M1, B = L.M2;
  const T m1 = L.m1, m2 = L.m2;
  const auto [l0, l1, l2, l3, l4, l5, l6] = L.l;
  auto R = [&](int k) { return ipow(r, k); };
  auto sq = [](T x) { return x * x; };
  const T s = 2 * m1 + m2, u = m1 + m2, v = 3 * m1 + m2, w = 3 * m1 + 2 * m2;
  return 4 * (l0 * sq(m1) * l1 +
              R(4 * (A + B)) * (4 * R(2 * A) * (l0 * l6 * sq(s) + l1 * l5 * sq(u)) + l0 * l5 * sq(w) +
                                R(4 * A) * (l1 * l6 * sq(w) + sq(m1) * l3 * l4) +
                                sq(m1) * l2 * (l3 + 4 * l4 * R(2 * A))) +
              R(2 * B) * (l0 * (l2 * sq(u) + l3 * sq(s) * R(2 * A) + l4 * sq(v) * R(4 * A)) +
                          l1 * R(2 * A) * (sq(m2) * l2 + l3 * sq(u) * R(2 * A) + l4 * sq(s) * R(4 * A))) +
              R(6 * (A + B)) * (R(2 * A) * (l2 * l6 * sq(v) + l3 * l5 * sq(u)) + l2 * l5 * sq(s) +
                                R(4 * A) * (l3 * l6 * sq(s) + sq(m2) * l4 * l5) + l4 * l6 * sq(u) * R(6 * A)) +
              sq(m1) * l5 * l6 * R(12 * A + 8 * B));
}

struct RadialProfiles {
  double rho1_inv;
  double rho2_inv;
};

RadialProfiles radial_profiles(const TodaParams& p, double r);

// the radial ground state: U1 = -ln(2 rho1_inv), U2 = -ln(4 rho2_inv)
template <class T>
struct GroundState {
  Lambdas<T> L;
  int N1, N2;

  explicit GroundState(const TodaParams& p) : L(make_lambdas<T>(p)), N1(p.N1), N2(p.N2) {}

  T U1(T r) const { using std::log; return -log(2 * rho1_inv(L, r)); }
  T U2(T r) const { using std::log; return -log(4 * rho2_inv(L, r)); }
  // r^{2N1} e^{2U1-U2} and r^{2N2} e^{2U2-3U1}
  T w1(T r) const {
    const T a = rho1_inv(L, r), b = rho2_inv(L, r);
    return ipow(r, 2 * N1) * b / (a * a);
  }
  T w2(T r) const {
    const T a = rho1_inv(L, r), b = rho2_inv(L, r);
    return ipow(r, 2 * N2) * a * a * a / (2 * b * b);
  }
};

}  // namespace g2toda
