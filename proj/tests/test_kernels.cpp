#include <doctest.h>

#include <cmath>
#include <numbers>

#include "g2toda/errors.hpp"
#include "g2toda/kernels.hpp"
#include "g2toda/toda.hpp"

using namespace g2toda;

TEST_CASE("adjoint map") {
  auto [a1, a2] = adjoint(1, 1);
  CHECK(a1 == 1.0);
  CHECK(a2 == doctest::Approx(-1.0 / 3));
  std::tie(a1, a2) = adjoint(0, 0);
  CHECK(a1 == 0.0);
  CHECK(a2 == 0.0);
  std::tie(a1, a2) = adjoint(1, 2);
  CHECK(a1 == 0.0);
  CHECK(a2 == doctest::Approx(1.0 / 3));
}

TEST_CASE("angular nodes and vanishing at the origin") {
  const TodaParams p{1, 2, 1.0, 1.0};
  const double th = std::numbers::pi / (2.0 * (3 * p.mu1() + 2 * p.mu2()));
  for (double r : {0.3, 1.0, 4.0}) {
    const auto on = kernel_eval(p, KernelTag::C61_1, r, 0.0);
    CHECK(std::abs(kernel_eval(p, KernelTag::C61_1, r, th).first) <= 1e-14 * std::abs(on.first));
  }
  const TodaParams q{1, 0, 1.0, 1.0};
  CHECK(kernel_eval(q, KernelTag::C54_1, 0.0, 0.0).first == 0.0);
  CHECK(kernel_eval(q, KernelTag::C54_1, 0.0, 0.0).second == 0.0);
  // Z2 carries r^{mu2}, Z1 carries r^{2 mu1 + mu2}
  const double z2a = kernel_eval(q, KernelTag::C54_1, 1e-3, 0.0).second;
  const double z2b = kernel_eval(q, KernelTag::C54_1, 2e-3, 0.0).second;
  CHECK(z2b / z2a == doctest::Approx(2.0).epsilon(1e-3));
  const double z1a = kernel_eval(q, KernelTag::C54_1, 1e-3, 0.0).first;
  const double z1b = kernel_eval(q, KernelTag::C54_1, 2e-3, 0.0).first;
  CHECK(z1b / z1a == doctest::Approx(std::pow(2.0, 2 * q.mu1() + q.mu2())).epsilon(1e-3));
}

TEST_CASE("lambda4 kernel is minus the lambda4 derivative") {
  const TodaParams p = TodaParams::symmetric(0);
  const double h = 1e-5 * p.lambda4;
  TodaParams pp = p, pm = p;
  pp.lambda4 += h;
  pm.lambda4 -= h;
  // r = 1 is a node of the radial part
  for (double r : {0.4, 2.5}) {
    const auto [u1p, u2p] = toda_fields(pp, {}, r, 0);
    const auto [u1m, u2m] = toda_fields(pm, {}, r, 0);
    const auto [z1, z2] = kernel_eval(p, KernelTag::Lambda4, r, 0);
    CHECK(-(u1p - u1m) / (2 * h) == doctest::Approx(z1).epsilon(1e-6));
    CHECK(-(u2p - u2m) / (2 * h) == doctest::Approx(z2).epsilon(1e-6));
  }
}

TEST_CASE("kernel residuals and negative controls") {
  const auto radii = geometric_radii(0.02, 20, 21);
  CHECK(verify_kernel(TodaParams{0, 0, 1.0, 1.0}, KernelTag::Lambda4, radii).max_rel <= 1e-6);
  CHECK(verify_kernel(TodaParams{1, 0, 1.0, 1.0}, KernelTag::C62_1, radii).max_rel <= 1e-6);
  KernelOptions wrong;
  wrong.c43_lambda3_sign = -1.0;
  CHECK(verify_kernel(TodaParams{0, 0, 1.0, 1.0}, KernelTag::C43_1, radii, wrong).max_rel >= 1e-2);

  CHECK(verify_adjoint_kernel(TodaParams{0, 0, 1.0, 1.0}, KernelTag::Lambda5, radii).max_rel <= 1e-6);
  CHECK(verify_adjoint_kernel(TodaParams{0, 1, 1.0, 1.0}, KernelTag::C52_1, radii).max_rel <= 1e-6);
  const RadialPair128 gauss = [](f128 r) { return std::pair<f128, f128>(exp(-r * r), f128(0)); };
  CHECK(verify_radial_pair(TodaParams{0, 0, 1.0, 1.0}, 0, gauss, true, geometric_radii(0.1, 3, 9)).max_rel >= 0.1);
}

TEST_CASE("every kernel and adjoint solves its system") {
  const auto radii = geometric_radii(0.05, 10, 9);
  const TodaParams p{1, 2, 0.3, 2.5};
  for (int i = 0; i < kNumKernels; ++i) {
    INFO(kernel_name(kernel_tag(i)));
    CHECK(verify_kernel(p, kernel_tag(i), radii).max_rel <= 1e-6);
    if (i >= 2) CHECK(verify_adjoint_kernel(p, kernel_tag(i), radii).max_rel <= 1e-6);
  }
}

TEST_CASE("Gram matrices") {
  const TodaParams p{0, 0, 1.0, 1.0};
  const GramResult d = gram_delta(p);
  CHECK(d.failures.empty());
  CHECK(std::abs(d.det) > 0);
  CHECK(std::isfinite(d.log10_abs_det));
  const double scale = d.matrix.cwiseAbs().maxCoeff();
  for (int i = 0; i < kNumKernels; ++i)
    for (int j = 0; j < kNumKernels; ++j) {
      const KernelTag a = kernel_tag(i), b = kernel_tag(j);
      if (kernel_mode(a, 1, 1) != kernel_mode(b, 1, 1) || kernel_is_sine(a) != kernel_is_sine(b))
        CHECK(std::abs(d.matrix(i, j)) <= 1e-12 * scale);
    }
  const GramResult d23 = gram_delta(TodaParams{1, 2, 1.0, 1.0});
  CHECK(d23.failures.empty());
  CHECK(std::abs(d23.det) > 0);

  const GramResult s = gram_star(TodaParams{1, 2, 1.0, 1.0});
  CHECK(s.failures.empty());
  CHECK(std::abs(s.det) > 0);
  const double ss = s.matrix.cwiseAbs().maxCoeff();
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      const KernelTag a = kernel_tag(i + 2), b = kernel_tag(j + 2);
      if (kernel_mode(a, 2, 3) != kernel_mode(b, 2, 3) || kernel_is_sine(a) != kernel_is_sine(b))
        CHECK(std::abs(s.matrix(i, j)) <= 1e-12 * ss);
    }
  // at mu = 1 the c43 and c54 adjoints decay too slowly for the plane integral to exist
  const GramResult s11 = gram_star(p);
  CHECK_FALSE(s11.failures.empty());
  CHECK(std::isnan(s11.det));
}

TEST_CASE("angular overlaps") {
  const double pi = std::numbers::pi;
  CHECK(angular_overlap(0, false, 0, false) == doctest::Approx(2 * pi));
  CHECK(angular_overlap(3, false, 3, false) == doctest::Approx(pi));
  CHECK(angular_overlap(3, true, 3, true) == doctest::Approx(pi));
  CHECK(std::abs(angular_overlap(3, true, 3, false)) <= 1e-14);
  CHECK(std::abs(angular_overlap(2, false, 3, false)) <= 1e-14);
}
