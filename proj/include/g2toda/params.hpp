#pragma once

#include <array>
#include <cmath>
#include <string>

namespace g2toda {

struct TodaParams {
  int N1 = 0;
  int N2 = 0;
  double lambda4 = 1.0;
  double lambda5 = 1.0;

  int mu1() const { return N1 + 1; }
  int mu2() const { return N2 + 1; }
  void validate() const;

  // lambda4 = 1/(3 2^10 mu^6), lambda5 = 1/(15 2^9 mu^6) with N1 = N2 = N
  static TodaParams symmetric(int N);
  // lambda4 = lt/(2^{7/2} mu1 mu2 (mu1+mu2))^2, lambda5 = 1/lt
  static TodaParams scaled(int N1, int N2, double lambda_tilde);
};

// (c43_1, c43_2, c52_1, c52_2, c53_1, c53_2, c54_1, c54_2, c61_1, c61_2, c62_1, c62_2)
using PerturbVector = std::array<double, 12>;

enum class Shape { L4, L5, C43, C52, C53, C54, C61, C62 };

enum class KernelTag {
  Lambda4, Lambda5,
  C43_1, C43_2, C52_1, C52_2, C53_1, C53_2,
  C54_1, C54_2, C61_1, C61_2, C62_1, C62_2
};

inline constexpr int kNumKernels = 14;

inline KernelTag kernel_tag(int i) { return static_cast<KernelTag>(i); }
inline int kernel_index(KernelTag t) { return static_cast<int>(t); }

Shape kernel_shape(KernelTag t);
bool kernel_is_sine(KernelTag t);
int shape_mode(Shape s, int mu1, int mu2);
int kernel_mode(KernelTag t, int mu1, int mu2);
std::string kernel_name(KernelTag t);
std::string shape_name(Shape s);

// index into PerturbVector, or -1 for the scaling kernels
inline int perturb_index(KernelTag t) { return kernel_index(t) - 2; }

template <class T>
T ipow(T x, int k) {
  T result(1);
  if (k < 0) {
    x = T(1) / x;
    k = -k;
  }
  while (k) {
    if (k & 1) result *= x;
    x *= x;
    k >>= 1;
  }
  return result;
}

}  // namespace g2toda
