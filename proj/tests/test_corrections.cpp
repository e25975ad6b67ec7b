#include <doctest.h>

#include <cmath>

#include "g2toda/assembly.hpp"
#include "g2toda/corrections.hpp"
#include "g2toda/errors.hpp"
#include "g2toda/kernels.hpp"

using namespace g2toda;

namespace {

// coefficients of prod (|z|^2 - 2 eps Re(z conj p) + eps^2 |p|^2) in eps
std::vector<double> eps_expansion(const std::vector<cplx>& pts, cplx z) {
  std::vector<double> c{1.0};
  for (auto p : pts) {
    const double q[3] = {std::norm(z), -2 * std::real(z * std::conj(p)), std::norm(p)};
    std::vector<double> next(c.size() + 2, 0.0);
    for (size_t i = 0; i < c.size(); ++i)
      for (int j = 0; j < 3; ++j) next[i + j] += c[i] * q[j];
    c = next;
  }
  return c;
}

}  // namespace

TEST_CASE("Taylor data of the vortex polynomials") {
  const cplx z(0.8, -0.3);
  VortexConfig one{{cplx(0, 0)}, {cplx(0, 0)}, 0.01};
  auto t = vortex_taylor(one, z);
  CHECK(t.f_eps == 0.0);
  CHECK(t.f_epseps == 0.0);

  VortexConfig pair{{cplx(1, 0), cplx(-1, 0)}, {cplx(0, 0), cplx(0, 0)}, 0.01};
  t = vortex_taylor(pair, z);
  CHECK(std::abs(t.f_eps) <= 1e-15);
  // f_epseps = 2 |z|^2 sum |p|^2 + 8 Re(z conj p1) Re(z conj p2) = -4 |z|^2 cos 2 theta
  const double r2 = std::norm(z), th = std::arg(z);
  CHECK(t.f_epseps == doctest::Approx(-4 * r2 * std::cos(2 * th)).epsilon(1e-13));

  VortexConfig gen{{cplx(0.3, 0.2), cplx(-0.7, 0.1), cplx(0.25, -0.9)}, {cplx(0.5, 0.5), cplx(-0.1, 0.4)}, 0.01};
  for (cplx w : {cplx(0.8, -0.3), cplx(-1.7, 2.2)}) {
    const auto e = vortex_taylor(gen, w);
    const auto cp = eps_expansion(gen.p, w), cq = eps_expansion(gen.q, w);
    CHECK(e.f == doctest::Approx(cp[0]).epsilon(1e-13));
    CHECK(e.f_eps == doctest::Approx(cp[1]).epsilon(1e-12));
    CHECK(e.f_epseps == doctest::Approx(2 * cp[2]).epsilon(1e-12));
    CHECK(e.g == doctest::Approx(cq[0]).epsilon(1e-13));
    CHECK(e.g_eps == doctest::Approx(cq[1]).epsilon(1e-12));
    CHECK(e.g_epseps == doctest::Approx(2 * cq[2]).epsilon(1e-12));
    CHECK(vortex_poly(gen.p, 0.0, w) == doctest::Approx(cp[0]));
  }
}

TEST_CASE("regime classification") {
  VortexConfig sym{{cplx(0.2, 0.1)}, {cplx(0.2, 0.1)}, 0.01};
  auto info = classify(sym);
  CHECK(info.case_a);
  CHECK(info.regime == Regime::I);
  CHECK(std::abs(info.shift - cplx(0.2, 0.1)) <= 1e-15);
  const auto moved = translated(sym, info.shift);
  CHECK(std::abs(moved.p[0]) <= 1e-15);

  VortexConfig gen{{cplx(1, 0), cplx(1, 0), cplx(1, 0)}, {cplx(0, 0), cplx(0, 0), cplx(0, 0)}, 0.01};
  info = classify(gen);
  CHECK_FALSE(info.case_a);
  CHECK(info.case_b);

  VortexConfig bad{{cplx(1, 0), cplx(0, 0)}, {cplx(0, 0), cplx(0, 0), cplx(0, 0)}, 0.01};
  CHECK_THROWS_AS(classify(bad), ConfigError);
  VortexConfig three{{cplx(0, 0), cplx(0, 0)}, {cplx(0, 0)}, 0.01};
  CHECK(classify(three).regime == Regime::III);
  VortexConfig two{{cplx(0, 0), cplx(0, 0)}, {cplx(0, 0), cplx(0, 0), cplx(0, 0), cplx(0, 0)}, 0.01};
  CHECK(classify(two).regime == Regime::II);
}

TEST_CASE("centred vortices need no first-order corrections") {
  const TodaParams p = TodaParams::symmetric(2);
  const PolarGrid g = default_polar_grid(p, 0, 1e3, 401);
  VortexConfig c{{cplx(1, 0), cplx(-1, 0)}, {cplx(0, 1), cplx(0, -1)}, 0.02};
  CHECK(solve_Psi0(p, c, g).max_abs() == 0.0);
  const Field2D Psi0 = Field2D::zeros(g);
  for (KernelTag t : {KernelTag::C43_1, KernelTag::C62_2}) CHECK(solve_Psi_i(p, c, Psi0, t, g).max_abs() == 0.0);
}

TEST_CASE("first-order corrections for off-centre vortices") {
  const TodaParams p{2, 2, 1.0, 1.0};
  const PolarGrid g = default_polar_grid(p, 0, 1e3, 401);
  VortexConfig c{{cplx(1, 0), cplx(1, 0), cplx(1, 0)}, {cplx(0, 0), cplx(0, 0), cplx(0, 0)}, 0.02};
  const Field2D rhs = Psi0_rhs(p, c, g);
  CHECK(projection_defect(p, g, rhs) <= 1e-8);
  const Field2D Psi0 = solve_Psi0(p, c, g);
  const auto n = weighted_norms(g, Psi0, 0.5);
  CHECK(std::isfinite(n.norm_star));
  CHECK(n.norm_star > 0);

  VortexConfig c2 = c;
  for (auto& z : c2.p) z *= 2.0;
  Field2D diff = solve_Psi0(p, c2, g);
  diff += -2.0 * Psi0;
  CHECK(diff.max_abs() <= 1e-10 * Psi0.max_abs());

  for (KernelTag t : {KernelTag::C43_1, KernelTag::C53_2}) {
    INFO(kernel_name(t));
    CHECK(projection_defect(p, g, Psi_i_rhs(p, c, Psi0, t, g)) <= 1e-8);
  }
}

TEST_CASE("adjacent vortex counts break first-order solvability") {
  const TodaParams p{1, 2, 1.0, 1.0};
  const PolarGrid g = default_polar_grid(p, 0, 1e3, 401);
  VortexConfig c{{cplx(1, 0), cplx(1, 0)}, {cplx(0, 0), cplx(0, 0), cplx(0, 0)}, 0.02};
  const Field2D Psi0 = solve_Psi0(p, c, g);
  bool raised = false;
  for (int i = 2; i < kNumKernels && !raised; ++i) {
    try {
      solve_Psi_i(p, c, Psi0, kernel_tag(i), g);
    } catch (const SolvabilityError&) {
      raised = true;
    }
  }
  CHECK(raised);
}

TEST_CASE("closed-form profiles") {
  CHECK(q_eval(1, 5, 1.0) == doctest::Approx(-0.546875).epsilon(1e-14));
  for (int N : {1, 2, 4}) {
    CHECK(phi_eval(N, 5, 0.0) == doctest::Approx(-5.0 / 54).epsilon(1e-14));
    CHECK(phi_eval(N, 7, 0.0) == 0.0);
  }
}

TEST_CASE("phi ODE residuals") {
  const auto radii = geometric_radii(0.05, 20, 41);
  CHECK(verify_phi_ode(2, 1, radii) <= 1e-8);
  CHECK(verify_phi_ode(1, 7, radii) <= 1e-8);
  for (int N = 1; N <= 5; ++N)
    for (int i = 1; i <= 7; ++i) CHECK(verify_phi_ode(N, i, radii) <= 1e-8);
  PhiTable bad = phi_table(3);
  bad.coef[2] *= 1.01;
  CHECK(verify_phi_ode(1, 3, radii, &bad) >= 1e-3);
}

TEST_CASE("symmetric psi") {
  const RadialGrid g(1e-3, 1e3, 2401);
  const ScalarSolution s = solve_psi_symmetric(1, g);
  // 4th-order substitution check on the interior
  double worst = 0, smax = 0;
  const double h = g.h();
  for (int k = 2; k + 2 < g.size(); ++k) {
    const double r = g.r(k);
    const double tt = (-s.psi[k + 2] + 16 * s.psi[k + 1] - 30 * s.psi[k] + 16 * s.psi[k - 1] - s.psi[k - 2]) / (12 * h * h);
    const double res = tt / (r * r) + symmetric_weight(1, r) * s.psi[k] - symmetric_source(1, r);
    worst = std::max(worst, std::abs(res) * r * r);
    smax = std::max(smax, symmetric_source(1, r) * r * r);
  }
  CHECK(worst <= 1e-6 * smax);
  CHECK(psi_symmetric(1, 0.7) != doctest::Approx(psi_symmetric(2, 0.7)));
  CHECK(psi_symmetric(1, g.r(900)) == doctest::Approx(s.psi[900]).epsilon(1e-6));
}

TEST_CASE("duality of psi against the closed-form phi") {
  for (int N = 1; N <= 3; ++N)
    for (int i = 1; i <= 7; ++i) {
      const auto d = duality(N, i);
      INFO("N=", N, " i=", i);
      CHECK(d.rel <= 1e-6);
      CHECK(d.psi_q == doctest::Approx(d.src_phi).epsilon(1e-6));
    }
}

TEST_CASE("symmetric bundle is (psi, 5 psi / 3) up to the scaling kernels") {
  const TodaParams p = TodaParams::symmetric(1);
  VortexConfig c{{cplx(0, 0)}, {cplx(0, 0)}, 0.02};
  // least-squares fit of the difference on the two mode-0 kernels, over r in [1e-2, 1e2]
  auto fit = [&](int nodes, double& dmax, double& psimax) {
    const PolarGrid g = default_polar_grid(p, 0, 1e3, nodes);
    const CorrectionBundle b = build_corrections(p, c, Regime::I, g);
    CHECK(b.Psi_zero);
    CHECK(b.Psi0.max_abs() == 0.0);
    for (int m = 1; m <= g.max_mode(); ++m) {
      const ModeField mf = extract_mode(g, b.psi0, m, Parity::Cos);
      CHECK(mf.comp[0].cwiseAbs().maxCoeff() <= 1e-12 * b.psi0.max_abs());
    }
    const ScalarSolution s = solve_psi_symmetric(1, g.radial);
    const Field2D z4 = kernel_field(p, KernelTag::Lambda4, g), z5 = kernel_field(p, KernelTag::Lambda5, g);
    std::vector<int> rows;
    for (int k = 0; k < g.radial.size(); ++k)
      if (g.radial.r(k) >= 1e-2 && g.radial.r(k) <= 1e2) rows.push_back(k);
    const int n = int(rows.size());
    Eigen::MatrixXd A(2 * n, 2);
    Eigen::VectorXd d(2 * n);
    for (int i = 0; i < n; ++i) {
      const int k = rows[i];
      for (int comp = 0; comp < 2; ++comp) {
        A(2 * i + comp, 0) = z4.c[comp](k, 0);
        A(2 * i + comp, 1) = z5.c[comp](k, 0);
        d[2 * i + comp] = b.psi0.c[comp](k, 0) - (comp == 0 ? 1.0 : 5.0 / 3) * s.psi[k];
      }
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(d);
    dmax = d.cwiseAbs().maxCoeff();
    psimax = s.psi.cwiseAbs().maxCoeff();
    return (A * coef - d).cwiseAbs().maxCoeff();
  };
  double d1, p1, d2, p2;
  const double coarse = fit(1201, d1, p1), fine = fit(2401, d2, p2);
  // the leftover is second-order discretization error of the bundle solve
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.2));
  CHECK(fine <= 2e-4 * p2);
  CHECK(d2 >= 1e-2 * p2);
}
