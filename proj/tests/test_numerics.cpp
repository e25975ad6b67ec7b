#include <doctest.h>

#include <cmath>
#include <numbers>

#include "g2toda/errors.hpp"
#include "g2toda/kernels.hpp"
#include "g2toda/numerics.hpp"

using namespace g2toda;

TEST_CASE("half-line quadrature") {
  CHECK(integrate_halfline([](double r) { return 2 * r / ((1 + r * r) * (1 + r * r)); }).value ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate_halfline([](double r) { return r * std::exp(-r * r); }).value == doctest::Approx(0.5).epsilon(1e-10));
  // -560 r^11/(1+r^2)^12 integrates to -280 B(6,6) = -10/99
  const auto q = integrate_halfline([](double r) { return -560 * std::pow(r, 11) / std::pow(1 + r * r, 12); });
  CHECK(q.value == doctest::Approx(-10.0 / 99).epsilon(1e-10));
  CHECK(q.error <= 1e-10 * 10.0 / 99);
  CHECK_THROWS_AS(integrate_halfline([](double r) { return 1.0 / (1 + r); }), QuadratureError);
}

TEST_CASE("log-panel quadrature") {
  const auto q = integrate_log([](double r) { return 1.0 / r; }, 1e-3, 1e3);
  CHECK(q.value == doctest::Approx(6 * std::log(10.0)).epsilon(1e-12));
}

namespace {

ModeField sample(const RadialGrid& g, int m, double (*f)(double, int)) {
  ModeField mf;
  mf.mode = m;
  mf.comp.assign(1, Eigen::VectorXd(g.size()));
  for (int k = 0; k < g.size(); ++k) mf.comp[0][k] = f(g.r(k), m);
  return mf;
}

}  // namespace

TEST_CASE("mode Laplacian") {
  const RadialGrid g(1e-2, 1e2, 9211);
  auto lap = [&](double (*f)(double, int), int m) { return laplacian_mode(sample(g, m, f), g).comp[0]; };

  const Eigen::VectorXd a = lap([](double r, int) { return r * r; }, 0);
  for (int k = 0; k < g.size(); ++k) CHECK(a[k] == doctest::Approx(4.0).epsilon(1e-8));

  // errors relative to (m^2 + 1)|f|/r^2
  for (int m : {1, 3}) {
    const Eigen::VectorXd b = lap([](double r, int m) { return std::pow(r, m); }, m);
    for (int k = 0; k < g.size(); ++k) CHECK(std::abs(b[k]) <= 1e-8 * (m * m + 1) * std::pow(g.r(k), m - 2));
  }

  // f = 1/(1+r^2): f'' + f'/r = (4 r^2 - 4)/(1+r^2)^3
  const Eigen::VectorXd c = lap([](double r, int) { return 1 / (1 + r * r); }, 0);
  double worst = 0;
  for (int k = 0; k < g.size(); ++k) {
    const double r = g.r(k), exact = (4 * r * r - 4) / std::pow(1 + r * r, 3);
    worst = std::max(worst, std::abs(c[k] - exact) / (1 / (r * r * (1 + r * r)) + std::abs(exact)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("weighted norms") {
  std::vector<double> radii, h, f, z;
  for (double r = 0; r <= 1e3; r += 0.5) {
    radii.push_back(r);
    h.push_back(std::log(2 + r));
    f.push_back(std::pow(1 + r, -2.5));
    z.push_back(0.0);
  }
  CHECK(weighted_norms(radii, h, 0.5).norm_star == doctest::Approx(1.0));
  CHECK(weighted_norms(radii, f, 0.5).norm_starstar == doctest::Approx(1.0));
  const auto w0 = weighted_norms(radii, z, 0.5);
  CHECK(w0.norm_star == 0.0);
  CHECK(w0.norm_starstar == 0.0);
  CHECK_THROWS_AS(weighted_norms(radii, z, 1.5), ConfigError);
}

TEST_CASE("Fourier extraction round trip and inner product") {
  PolarGrid g{RadialGrid(1e-2, 1e2, 201), 9};
  Field2D f = Field2D::zeros(g);
  for (int k = 0; k < g.radial.size(); ++k)
    for (int j = 0; j < g.n_theta; ++j) {
      const double r = g.radial.r(k), th = g.theta(j);
      f.c[0](k, j) = std::exp(-r) * (1 + 0.5 * std::cos(3 * th));
      f.c[1](k, j) = std::exp(-r) * std::sin(2 * th);
    }
  const ModeField m3 = extract_mode(g, f, 3, Parity::Cos);
  const ModeField s2 = extract_mode(g, f, 2, Parity::Sin);
  for (int k = 0; k < g.radial.size(); ++k) {
    CHECK(m3.comp[0][k] == doctest::Approx(0.5 * std::exp(-g.radial.r(k))));
    CHECK(std::abs(m3.comp[1][k]) <= 1e-15);
    CHECK(s2.comp[1][k] == doctest::Approx(std::exp(-g.radial.r(k))));
  }
  Field2D back = Field2D::zeros(g);
  for (int m = 0; m <= g.max_mode(); ++m) {
    add_mode(g, extract_mode(g, f, m, Parity::Cos), back);
    if (m > 0) add_mode(g, extract_mode(g, f, m, Parity::Sin), back);
  }
  back += -1.0 * f;
  CHECK(back.max_abs() <= 1e-14);
  // int e^{-2r} r dr dtheta = pi / 2
  Field2D one = Field2D::zeros(g);
  for (int k = 0; k < g.radial.size(); ++k)
    for (int j = 0; j < g.n_theta; ++j) one.c[0](k, j) = std::exp(-g.radial.r(k));
  CHECK(inner_product(g, one, one) == doctest::Approx(2 * std::numbers::pi / 4).epsilon(1e-3));
}

namespace {

// exact L applied to (r^m e^{-r^2}, 0), with L phi = Delta phi + C phi
ModeField manufactured_rhs(const TodaParams& p, const RadialGrid& g, int m) {
  const GroundState<long double> gs(p);
  ModeField rhs;
  rhs.mode = m;
  rhs.comp.assign(2, Eigen::VectorXd(g.size()));
  for (int k = 0; k < g.size(); ++k) {
    const double r = g.r(k), f = std::pow(r, m) * std::exp(-r * r);
    const double w1 = double(gs.w1(r)), w2 = double(gs.w2(r));
    rhs.comp[0][k] = (4 * r * r - 4 * (m + 1)) * f + 2 * w1 * f;
    rhs.comp[1][k] = -3 * w2 * f;
  }
  return rhs;
}

double manufactured_error(const TodaParams& p, const RadialGrid& g, int m) {
  const ModeSolution s = solve_linearized_mode(p, m, Parity::Cos, manufactured_rhs(p, g, m), {}, g);
  double err = 0;
  for (int k = 0; k < g.size(); ++k) {
    const double r = g.r(k), f = std::pow(r, m) * std::exp(-r * r);
    err = std::max({err, std::abs(s.phi.comp[0][k] - f), std::abs(s.phi.comp[1][k])});
  }
  return err;
}

}  // namespace

TEST_CASE("linearized mode solve") {
  const TodaParams p{0, 0, 1.0, 1.0};
  const RadialGrid g(1e-3, 1e3, 1201);
  // no kernel lives on mode 6 at mu = 1
  REQUIRE(kernels_of_mode(p, 6, Parity::Cos).empty());
  const double e1 = manufactured_error(p, g, 6);
  const double e2 = manufactured_error(p, g.refined(), 6);
  CHECK(e1 <= 1e-3);
  CHECK(e1 / e2 >= 3.0);
  CHECK(e1 / e2 <= 5.0);

  ModeField zero;
  zero.mode = 1;
  zero.comp.assign(2, Eigen::VectorXd::Zero(g.size()));
  const auto tags = kernels_of_mode(p, 1, Parity::Cos);
  REQUIRE(tags.size() == 2);
  const ModeSolution s0 = solve_linearized_mode(p, 1, Parity::Cos, zero, tags, g);
  CHECK(s0.phi.comp[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(s0.phi.comp[1].cwiseAbs().maxCoeff() == 0.0);
  for (double m : s0.multipliers) CHECK(m == 0.0);
  CHECK_THROWS_AS(solve_linearized_mode(p, 2, Parity::Cos, zero, tags, g), ConfigError);
}

TEST_CASE("deflated solve is orthogonal to Delta Z") {
  const TodaParams p{0, 0, 1.0, 1.0};
  const RadialGrid g(1e-3, 1e3, 801);
  const int m = 1;
  const auto tags = kernels_of_mode(p, m, Parity::Cos);
  ModeField h;
  h.mode = m;
  h.comp.assign(2, Eigen::VectorXd(g.size()));
  for (int k = 0; k < g.size(); ++k) {
    const double r = g.r(k);
    h.comp[0][k] = r * std::exp(-r) / (1 + r * r);
    h.comp[1][k] = -0.5 * r * r * std::exp(-r);
  }
  const ModeSolution s = solve_linearized_mode(p, m, Parity::Cos, h, tags, g);
  REQUIRE(s.multipliers.size() == tags.size());
  // orthogonality to Delta Z_i, measured with an independent trapezoid sum
  const auto L = make_lambdas<long double>(p);
  const GroundState<long double> gs(p);
  for (KernelTag t : tags) {
    double ip = 0, nz = 0, nphi = 0;
    for (int k = 0; k < g.size(); ++k) {
      const auto rk = radial_kernel(L, gs, kernel_shape(t), g.r(k));
      const double w = g.weight(k) * g.r(k) * g.r(k);
      ip += w * (rk.d1 * s.phi.comp[0][k] + rk.d2 * s.phi.comp[1][k]);
      nz += w * (rk.d1 * rk.d1 + rk.d2 * rk.d2);
      nphi += w * (s.phi.comp[0][k] * s.phi.comp[0][k] + s.phi.comp[1][k] * s.phi.comp[1][k]);
    }
    CHECK(std::abs(ip) <= 1e-8 * std::sqrt(nz * nphi));
  }
}
