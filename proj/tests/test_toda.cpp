#include <doctest.h>

#include <cmath>
#include <numbers>

#include "g2toda/fd.hpp"
#include "g2toda/kernels.hpp"
#include "g2toda/profiles.hpp"
#include "g2toda/toda.hpp"

using namespace g2toda;

namespace {

// radial Toda defect of profiles built from possibly altered constants, by 8th-order differences in ln r
double radial_defect(const Lambdas<f128>& L, int N1, int N2, double r) {
  auto U1 = [&](f128 t) { return -log(2 * rho1_inv(L, exp(t))); };
  auto U2 = [&](f128 t) { return -log(4 * rho2_inv(L, exp(t))); };
  const f128 R = r, t = log(R), h = 0.01;
  const f128 lap1 = second_derivative(U1, t, h).first / (R * R);
  const f128 lap2 = second_derivative(U2, t, h).first / (R * R);
  const f128 u1 = U1(t), u2 = U2(t);
  const f128 s1 = pow(R, 2 * N1) * exp(2 * u1 - u2);
  const f128 s2 = pow(R, 2 * N2) * exp(2 * u2 - 3 * u1);
  using std::max;
  return double(max(fabs(lap1 + s1) / max(fabs(lap1), s1), fabs(lap2 + s2) / max(fabs(lap2), s2)));
}

}  // namespace

TEST_CASE("scale constants at mu1 = mu2 = 1") {
  const TodaParams p{0, 0, 0.7, 1.3};
  const auto c = scale_constants(p);
  CHECK(c.lambda[3] == doctest::Approx(1.0 / 2304).epsilon(1e-14));
  CHECK(c.lambda[6] == doctest::Approx(512 * 0.7 * 1.3).epsilon(1e-14));
  const TodaParams s = TodaParams::symmetric(0);
  CHECK(s.lambda4 == doctest::Approx(1.0 / (3 * 1024)).epsilon(1e-15));
  CHECK(s.lambda5 == doctest::Approx(1.0 / (15 * 512)).epsilon(1e-15));
  CHECK(scale_constants(s).lambda[0] == doctest::Approx(1.0 / 46080).epsilon(1e-13));
}

TEST_CASE("symmetric profiles collapse to the single-bubble form") {
  const TodaParams p = TodaParams::symmetric(0);
  auto rho1G = [&](double r) { return 1.0 / (2 * radial_profiles(p, r).rho1_inv); };
  auto rho2G = [&](double r) { return 1.0 / (4 * radial_profiles(p, r).rho2_inv); };
  CHECK(rho1G(0.0) == doctest::Approx(23040).epsilon(1e-12));
  CHECK(rho2G(0.0) == doctest::Approx(22118400).epsilon(1e-12));
  CHECK(rho1G(1.0) == doctest::Approx(360).epsilon(1e-12));
  for (double r : {0.1, 0.5, 2.0, 7.0}) {
    CHECK(rho1G(r) == doctest::Approx(23040 / std::pow(1 + r * r, 6)).epsilon(1e-12));
    CHECK(rho2G(r) == doctest::Approx(22118400 / std::pow(1 + r * r, 10)).epsilon(1e-12));
  }
}

TEST_CASE("exact fields at a = 0") {
  const PerturbVector a{};
  for (const TodaParams& p : {TodaParams::symmetric(1), TodaParams{1, 2, 0.3, 2.5}}) {
    for (double r : {0.05, 0.7, 3.0}) {
      const auto [U1, U2] = toda_fields(p, a, r * std::cos(0.4), r * std::sin(0.4));
      CHECK(U1 == doctest::Approx(-std::log(2 * radial_profiles(p, r).rho1_inv)).epsilon(1e-13));
      CHECK(U2 == doctest::Approx(-std::log(4 * radial_profiles(p, r).rho2_inv)).epsilon(1e-12));
    }
  }
  const auto [U1, U2] = toda_fields(TodaParams::symmetric(0), a, std::cos(1.1), std::sin(1.1));
  CHECK(U2 == doctest::Approx(std::log(22118400.0 / 1024)).epsilon(1e-13));
}

TEST_CASE("Toda residual on r in [0.01, 50]") {
  const auto radii = geometric_radii(0.01, 50, 25);
  const PerturbVector a{};
  CHECK(toda_residual(TodaParams{0, 0, 1.0, 1.0}, a, radii, 3).max_rel <= 1e-8);
  CHECK(toda_residual(TodaParams{1, 2, 1.0, 1.0}, a, radii, 3).max_rel <= 1e-8);
  PerturbVector b{};
  b[0] = 0.03;
  b[7] = -0.02;
  b[11] = 0.01;
  CHECK(toda_residual(TodaParams::symmetric(1), b, radii, 5).max_rel <= 1e-8);
  PerturbVector c{};
  c[6] = 0.01;
  CHECK(toda_residual(TodaParams{1, 1, 1.0, 1.0}, c, radii, 5).max_rel <= 1e-8);
}

TEST_CASE("a wrong lambda6 is detected") {
  const TodaParams p{1, 2, 1.0, 1.0};
  auto L = make_lambdas<f128>(p);
  double good = 0.0, bad = 0.0;
  // beyond r ~ 10 the profiles are linear in ln r and the second difference cancels
  for (double r : geometric_radii(0.05, 5, 15)) good = std::max(good, radial_defect(L, p.N1, p.N2, r));
  L.l[6] *= 1.1;
  for (double r : geometric_radii(0.05, 5, 15)) bad = std::max(bad, radial_defect(L, p.N1, p.N2, r));
  CHECK(good <= 1e-8);
  CHECK(bad >= 1e-3);
}

TEST_CASE("directional derivatives of the family are the kernels") {
  const TodaParams p = TodaParams::symmetric(1);
  const double h = 1e-6;
  for (int i = 0; i < 12; ++i) {
    const KernelTag tag = kernel_tag(i + 2);
    PerturbVector ap{}, am{};
    ap[i] = h;
    am[i] = -h;
    const TodaFamily fp(p, ap), fm(p, am);
    for (double r : {0.6, 1.3}) {
      const double th = 0.37, x = r * std::cos(th), y = r * std::sin(th);
      const auto [p1, p2] = fp.fields<long double>(x, y);
      const auto [m1, m2] = fm.fields<long double>(x, y);
      const auto [z1, z2] = kernel_eval(p, tag, r, th);
      const double scale = std::max(std::abs(z1), std::abs(z2));
      INFO(kernel_name(tag), " r=", r);
      CHECK(std::abs(double(p1 - m1) / (2 * h) - z1) <= 1e-6 * scale);
      CHECK(std::abs(double(p2 - m2) / (2 * h) - z2) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("far-field slope of U1 and positivity of the profiles") {
  for (const TodaParams& p : {TodaParams{0, 0, 1.0, 1.0}, TodaParams{1, 2, 0.3, 2.5}}) {
    const double r1 = 1e2, r2 = 1e3;
    const double slope = (toda_fields(p, {}, r2, 0).first - toda_fields(p, {}, r1, 0).first) / std::log(r2 / r1);
    CHECK(slope == doctest::Approx(-2.0 * (4 * p.mu1() + 2 * p.mu2())).epsilon(0.01));
    double prev1 = 0, prev2 = 0;
    for (double r : geometric_radii(1e-3, 1e3, 60)) {
      const auto q = radial_profiles(p, r);
      CHECK(q.rho1_inv > 0);
      CHECK(q.rho2_inv > 0);
      if (r > 1) {
        CHECK(q.rho1_inv > prev1);
        CHECK(q.rho2_inv > prev2);
      }
      prev1 = q.rho1_inv;
      prev2 = q.rho2_inv;
    }
  }
}
