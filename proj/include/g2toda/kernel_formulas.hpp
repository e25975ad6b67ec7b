#pragma once

#include <utility>

#include "g2toda/profiles.hpp"

namespace g2toda {

// knobs used by negative controls; defaults give the true kernels
struct KernelOptions {
  int lambda4_z2_pow2 = 35;
  double c43_lambda3_sign = 1.0;
};

// radial parts (Z1, Z2) of the kernel with the given shape; the angular factor is cos or sin of mode*theta
template <class T>
std::pair<T, T> kernel_radial(const Lambdas<T>& L, Shape shape, T r, const KernelOptions& opt = {}) {
  const int A = L.M1, B = L.M2;
  const T m1 = L.m1, m2 = L.m2;
  const auto [l0, l1, l2, l3, l4, l5, l6] = L.l;
  auto R = [&](int k) { return ipow(r, k); };
  auto sq = [](T x) { return x * x; };
  auto P2 = [](int k) { return ipow(T(2), k); };
  const T p1 = T(1) / rho1_inv(L, r);
  const T p2 = T(1) / rho2_inv(L, r);
  const T s = 2 * m1 + m2, u = m1 + m2, v = 3 * m1 + m2, w = 3 * m1 + 2 * m2;
  T z1, z2;
  switch (shape) {
    case Shape::L4: {
      z1 = p1 * (R(2 * (3 * A + B)) + P2(7) * l5 * R(4 * (2 * A + B)) * sq(m1) * sq(m2) * sq(u) -
                 R(2 * (A + B)) / (P2(14) * sq(l4) * ipow(m1, 4) * sq(m2) * sq(u) * sq(s) * sq(v)) -
                 T(1) / (P2(21) * sq(l4) * l5 * ipow(m1, 4) * sq(m2) * ipow(u, 4) * ipow(s, 4) * sq(v) * sq(w)));
      const T t1 = -T(1) / (sq(l4) * sq(l5) * ipow(s, 6) * sq(v) * ipow(3 * sq(m1) + 2 * m1 * m2, 4));
      const T t2 = P2(21) * sq(m2) * l5 * ipow(u, 6) * R(6 * (A + B)) / (ipow(m1, 4) * sq(l4) * sq(v)) *
                   (P2(14) * ipow(m1, 4) * ipow(m2, 4) * sq(l4) * sq(u) * sq(v) * R(4 * A) *
                        (256 * sq(m1) * l4 * ipow(u, 4) * R(2 * A) + 3) -
                    1);
      const T t3 = 3 * P2(14) * sq(m2) * ipow(u, 4) * R(4 * (A + B)) *
                   (P2(14) * ipow(m1, 4) * sq(m2) * sq(l4) * sq(u) * sq(s) * sq(v) * R(4 * A) - 1) /
                   (ipow(m1, 4) * sq(l4) * ipow(s, 4) * sq(v));
      const T t4 = 2 * sq(u) * R(2 * B) *
                   (-sq(u) / (ipow(l4, 3) * ipow(s, 6) * ipow(v, 4)) -
                    192 * sq(m1) * sq(m2) * R(2 * A) / (sq(l4) * ipow(s, 4) * sq(v)) +
                    P2(20) * ipow(m1, 6) * sq(m2) * sq(u) * R(6 * A)) /
                   (ipow(m1, 8) * l5 * sq(w));
      const T t5 = P2(42) * ipow(m1, 4) * ipow(m2, 6) * sq(l5) * ipow(u, 10) * R(12 * A + 8 * B);
      z2 = 4 * p2 / (P2(opt.lambda4_z2_pow2) * ipow(m2, 4) * ipow(u, 8)) * (t1 + t2 + t3 + t4 + t5);
      break;
    }
    case Shape::L5: {
      z1 = p1 * (R(6 * A + 4 * B) + P2(7) * l4 * R(4 * (2 * A + B)) * sq(m1) * sq(m2) * sq(u) -
                 R(2 * A) / (P2(14) * sq(l5) * sq(m1) * sq(m2) * ipow(u, 4) * sq(s) * sq(w)) -
                 T(1) / (P2(21) * l4 * sq(l5) * ipow(m1, 4) * sq(m2) * ipow(u, 4) * ipow(s, 4) * sq(v) * sq(w)));
      const T inner = sq(m1) / (ipow(l5, 3) * ipow(s, 6) * ipow(w, 4)) +
                      3 * P2(6) * sq(m2) * sq(u) * R(2 * (A + B)) / (sq(l5) * ipow(s, 4) * sq(w)) -
                      P2(20) * sq(m1) * sq(m2) * ipow(u, 6) * R(6 * (A + B));
      z2 = 4 * p2 *
           (3 * sq(m2) * l4 * R(10 * A + 6 * B) + P2(8) * ipow(m1, 4) * sq(m2) * l4 * l5 * sq(u) * R(12 * A + 8 * B) +
            P2(7) * sq(m1) * sq(m2) * sq(l4) * ipow(u, 4) * R(6 * (2 * A + B)) +
            3 * R(8 * A + 6 * B) / (P2(7) * sq(m1) * sq(s)) -
            l4 * R(2 * (3 * A + B)) / (P2(14) * sq(m1) * sq(m2) * sq(l5) * ipow(u, 4) * sq(w)) -
            3 * R(2 * (2 * A + B)) / (P2(21) * ipow(m1, 4) * sq(m2) * sq(l5) * ipow(u, 4) * ipow(s, 4) * sq(w)) -
            R(2 * B) / (P2(35) * ipow(m1, 8) * ipow(m2, 4) * sq(l4) * sq(l5) * ipow(u, 4) * ipow(s, 6) * ipow(v, 4) * sq(w)) -
            inner / (P2(34) * ipow(m1, 6) * ipow(m2, 4) * l4 * ipow(u, 8) * sq(v)));
      break;
    }
    case Shape::C43: {
      z1 = p1 * (l4 * R(5 * A + 2 * B) + l6 * s * R(7 * A + 4 * B) / (2 * m2) + l1 * u * R(A) / (2 * v) +
                 opt.c43_lambda3_sign * l3 * u * s * R(3 * A + 2 * B) / (2 * m2 * v));
      z2 = 4 * p2 * R(A + 2 * B) / (2 * m2 * v) *
           (sq(u) * (l0 * l3 * sq(s) + l1 * sq(m2) * l2) +
            R(4 * A) * (2 * R(2 * B) * (l0 * l6 * v * w * sq(s) + m2 * (l1 * l5 * sq(u) * w + 2 * sq(m1) * l2 * l4 * v)) +
                        3 * l1 * m2 * l4 * u * s * v) +
            2 * m2 * s * R(2 * A) * (l0 * l4 * sq(v) + l1 * l3 * sq(u)) +
            s * R(2 * (3 * A + B)) * (2 * u * (l1 * l6 * sq(w) + sq(m1) * l3 * l4) + s * R(2 * B) * (l2 * l6 * sq(v) + l3 * l5 * sq(u))) +
            2 * u * v * R(4 * (2 * A + B)) * (l3 * l6 * sq(s) + sq(m2) * l4 * l5) +
            3 * m2 * l4 * l6 * u * s * v * R(10 * A + 4 * B));
      break;
    }
    case Shape::C52: {
      z1 = p1 * R(2 * A + B) / (u * w) *
           (R(2 * A) * (m1 * l4 * v + w * R(2 * B) * (l5 * u - 2 * l6 * v * R(2 * A))) - m1 * l3 * u);
      z2 = 4 * p2 * R(2 * A + B) / (u * w) *
           (R(2 * B) * (-2 * w * R(2 * A) * (2 * l0 * l6 * sq(s) * v - l1 * m2 * l5 * sq(u)) + l0 * l5 * sq(u) * sq(w) -
                        2 * u * v * R(4 * A) * (l1 * l6 * sq(w) + sq(m1) * l3 * l4) +
                        sq(m1) * l2 * (l3 * sq(u) - 2 * m2 * l4 * v * R(2 * A))) +
            sq(m1) * (l0 * l4 * sq(v) + l1 * l3 * sq(u)) +
            m1 * R(4 * (A + B)) * (-2 * w * (l2 * l6 * sq(v) + l3 * l5 * sq(u)) - 2 * u * R(2 * A) * (l3 * l6 * sq(s) + sq(m2) * l4 * l5) +
                                   3 * l4 * l6 * u * v * w * R(4 * A)) +
            3 * m1 * l5 * l6 * u * v * w * R(8 * A + 6 * B));
      break;
    }
    case Shape::C53: {
      z1 = p1 * (m1 * l2 * R(A + B) / (2 * w) - m1 * l3 * s * R(3 * A + B) / (2 * m2 * w) + l5 * R(5 * A + 3 * B) -
                 l6 * s * R(7 * A + 3 * B) / (2 * m2));
      z2 = 4 * p2 / (2 * m2 * w) *
           (R(3 * (A + B)) * (2 * R(2 * A) * (m2 * (2 * l1 * l5 * sq(u) * w + sq(m1) * l2 * l4 * v) - l0 * l6 * sq(s) * v * w) +
                              2 * m2 * s * (l0 * l5 * sq(w) + sq(m1) * l2 * l3) - sq(s) * R(4 * A) * (l1 * l6 * sq(w) + sq(m1) * l3 * l4)) -
            sq(m1) * R(A + B) * (l0 * l3 * sq(s) + l1 * sq(m2) * l2) -
            m1 * R(5 * (A + B)) * (2 * s * R(2 * A) * (l2 * l6 * sq(v) + l3 * l5 * sq(u)) - 3 * m2 * l2 * l5 * s * w +
                                   2 * w * R(4 * A) * (l3 * l6 * sq(s) + sq(m2) * l4 * l5)) +
            3 * m1 * m2 * l5 * l6 * s * w * R(11 * A + 7 * B));
      break;
    }
    case Shape::C54: {
      z1 = p1 * (l5 * R(6 * A + 3 * B) + l2 * R(2 * A + B) * m1 * v / (u * w));
      z2 = 4 * p2 * R(B) / (u * w) *
           (l0 * u * v * (sq(m1) * l2 + l5 * sq(w) * R(2 * (2 * A + B))) +
            R(2 * (2 * A + B)) * (l5 * sq(u) * w * R(2 * A) * (2 * l1 * s + m1 * R(2 * (A + B)) * (l3 + l6 * R(2 * (2 * A + B)))) +
                                  m1 * l2 * (m1 * v * (l3 * u + 2 * l4 * s * R(2 * A)) +
                                             R(2 * (A + B)) * (6 * l5 * u * sq(s) + l6 * sq(v) * w * R(2 * A)))));
      break;
    }
    case Shape::C61: {
      z1 = p1 * (l6 * R(5 * A + 2 * B) + l5 * R(3 * A + 2 * B) * m2 * u / (s * v));
      z2 = 4 * p2 * R(3 * A + 2 * B) / (s * v) *
           (2 * m1 * (l0 * l6 * sq(s) * v - l1 * m2 * l5 * sq(u)) -
            R(2 * B) * (m2 * l2 * s * (l5 * sq(u) + l6 * sq(v) * R(2 * A)) +
                        l3 * u * s * R(2 * A) * (m2 * l5 * u + l6 * s * v * R(2 * A)) +
                        l4 * u * v * R(4 * A) * (sq(m2) * l5 + l6 * sq(s) * R(2 * A))) -
            6 * sq(m1) * l5 * l6 * u * s * R(6 * A + 4 * B));
      break;
    }
    case Shape::C62: {
      z1 = p1 * (l6 * R(5 * A + 3 * B) - l4 * R(3 * A + B) * m1 * m2 / (s * w));
      z2 = 4 * p2 * R(3 * A + B) / (s * w) *
           (R(2 * B) * (2 * u * (l0 * l6 * sq(s) * w + sq(m1) * m2 * l2 * l4) + m2 * s * R(2 * A) * (l1 * l6 * sq(w) + sq(m1) * l3 * l4)) +
            sq(m1) * l1 * m2 * l4 * s -
            m1 * R(4 * (A + B)) * (w * (l3 * l6 * sq(s) + sq(m2) * l4 * l5) + 6 * l4 * l6 * sq(u) * s * R(2 * A)) -
            m1 * l5 * l6 * sq(s) * w * R(6 * (A + B)));
      break;
    }
  }
  return {z1, z2};
}

}  // namespace g2toda
