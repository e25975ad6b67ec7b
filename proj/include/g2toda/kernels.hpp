#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "g2toda/kernel_formulas.hpp"
#include "g2toda/numerics.hpp"
#include "g2toda/params.hpp"
#include "g2toda/precision.hpp"
#include "g2toda/profiles.hpp"

namespace g2toda {

template <class T>
std::pair<T, T> kernel_eval_t(const Lambdas<T>& L, KernelTag tag, T r, T theta, const KernelOptions& opt = {}) {
  using std::cos;
  using std::sin;
  const auto [z1, z2] = kernel_radial(L, kernel_shape(tag), r, opt);
  const T m = T(kernel_mode(tag, L.M1, L.M2));
  const T ang = kernel_is_sine(tag) ? sin(m * theta) : cos(m * theta);
  return {z1 * ang, z2 * ang};
}

std::pair<double, double> kernel_eval(const TodaParams& p, KernelTag tag, double r, double theta,
                                      const KernelOptions& opt = {});

inline std::pair<double, double> adjoint(double z1, double z2) { return {2 * z1 - z2, (2.0 / 3.0) * z2 - z1}; }

// radial parts of Z, Z* and of Delta Z = -(w1 (2Z1 - Z2), w2 (2Z2 - 3Z1))
struct RadialKernel {
  double z1, z2;
  double s1, s2;
  double d1, d2;
};

RadialKernel radial_kernel(const Lambdas<long double>& L, const GroundState<long double>& g, Shape shape, double r,
                           const KernelOptions& opt = {});

struct KernelResidual {
  double max_rel = 0.0;
  double max_abs = 0.0;
  double worst_r = 0.0;
  double richardson = 0.0;
};

// radial pair (f1, f2) times the angular factor of mode m
using RadialPair128 = std::function<std::pair<f128, f128>(f128 r)>;

// the linearized system (or its adjoint) applied with f'' + f'/r - m^2 f/r^2
KernelResidual verify_radial_pair(const TodaParams& p, int mode, const RadialPair128& f, bool adjoint_system,
                                  const std::vector<double>& radii);

KernelResidual verify_kernel(const TodaParams& p, KernelTag tag, const std::vector<double>& radii,
                             const KernelOptions& opt = {});
KernelResidual verify_adjoint_kernel(const TodaParams& p, KernelTag tag, const std::vector<double>& radii,
                                     const KernelOptions& opt = {});

// geometric radii in [a, b]
std::vector<double> geometric_radii(double a, double b, int n);

struct GramResult {
  Eigen::MatrixXd matrix;
  double det = 0.0;
  double log10_abs_det = 0.0;
  double cond = 0.0;
  std::vector<std::string> failures;  // entries whose quadrature did not converge
};

// (int Delta Z_i . Z_j)_{14x14}
GramResult gram_delta(const TodaParams& p, Exec exec = Exec::Parallel);
// (int Z*_i . Z*_j)_{12x12} over the c kernels
GramResult gram_star(const TodaParams& p, Exec exec = Exec::Parallel);

// int_0^{2pi} a(m theta) b(m' theta) by the trapezoid rule
double angular_overlap(int m, bool sin_a, int mp, bool sin_b);

}  // namespace g2toda
