#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "g2toda/errors.hpp"
#include "g2toda/reduced.hpp"

using namespace g2toda;

TEST_CASE("T entries against the closed forms") {
  for (int N = 1; N <= 5; ++N) {
    const TBreakdown b = T_entries(N);
    const ClosedForms c = closed_forms(N);
    INFO("N=", N);
    CHECK(b.T[2] == doctest::Approx(c.T3).epsilon(1e-6));
    CHECK(b.T[3] == doctest::Approx(c.T4).epsilon(1e-6));
    CHECK(b.T[6] == doctest::Approx(c.T7).epsilon(1e-6));
    CHECK(b.T[7] == doctest::Approx(c.T8).epsilon(1e-6));
    CHECK(b.T[0] * b.T[5] - b.T[1] * b.T[4] == doctest::Approx(c.combo).epsilon(1e-6));
    CHECK(c.combo > 0);
    CHECK(c.T8 == doctest::Approx(c.T8_expanded).epsilon(1e-12));
    for (int k = 0; k < 8; ++k) CHECK(b.T[k] == doctest::Approx(b.J[k] + b.dual[k]).epsilon(1e-14));
  }
}

TEST_CASE("frozen T entries at N = 1") {
  const TEntries T = T_entries(1).T;
  const double ref[8] = {116.9709486, -88.86436991, 406.863937, 138.1072816,
                         -88.86436991, 73.18589103, 69.30914021, 25.05398836};
  for (int k = 0; k < 8; ++k) CHECK(T[k] == doctest::Approx(ref[k]).epsilon(1e-8));
}

TEST_CASE("sine kernels give the same entries") {
  for (int N : {1, 3}) {
    const TEntries c = T_entries(N).T, s = T_entries_sine(N);
    for (int k = 0; k < 8; ++k) CHECK(s[k] == doctest::Approx(c[k]).epsilon(1e-10));
  }
}

TEST_CASE("T3 at N = 1 from its integer coefficient sum") {
  const std::string S1 = t3_polynomial(1);
  const double T3 = std::numbers::pi * std::stod(S1) / (5405400.0 * 1024);
  CHECK(closed_forms(1).T3 == doctest::Approx(T3).epsilon(1e-14));
  CHECK(S1.find_first_not_of("-0123456789") == std::string::npos);
}

TEST_CASE("reduced determinant") {
  for (int N = 1; N <= 5; ++N) {
    const TEntries T = T_entries(N).T;
    const DetReport d = det_reduced(T);
    INFO("N=", N);
    CHECK(std::abs(d.dense) > 1e-30);
    CHECK(d.rel_exp2 <= 1e-10);
    CHECK(d.rel_exp3 > 1.0);
  }
  TEntries T = T_entries(1).T;
  const double before = std::abs(det_reduced(T).dense);
  T[5] = T[1] * T[4] / T[0];
  CHECK(std::abs(det_reduced(T).dense) <= 1e-12 * before);
}

TEST_CASE("T matrix layout") {
  TEntries T;
  for (int k = 0; k < 8; ++k) T[k] = k + 1;
  const Eigen::MatrixXd M = assemble_T(T);
  for (int i : {0, 1}) {
    CHECK(M(i, i) == 1);
    CHECK(M(i, i + 6) == 2);
    CHECK(M(i + 6, i) == 5);
    CHECK(M(i + 6, i + 6) == 6);
    CHECK(M(i + 2, i + 2) == 3);
    CHECK(M(i + 4, i + 4) == 4);
    CHECK(M(i + 8, i + 8) == 7);
    CHECK(M(i + 10, i + 10) == 8);
  }
  CHECK(M.cwiseAbs().sum() == doctest::Approx(2 * (1 + 2 + 3 + 4 + 5 + 6 + 7 + 8)));
}

TEST_CASE("gamma constants") {
  const double pi = std::numbers::pi;
  const GammaTable g = gamma_constants(1, 1);
  CHECK(g.gamma[0] == doctest::Approx(10912 * pi * pi / std::sin(pi / 3)).epsilon(1e-13));
  CHECK(g.gamma[2] < 0);
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) {
      if (a == 3 && b == 2) continue;
      INFO(a, " ", b);
      const GammaTable t = gamma_constants(a, b);
      for (double v : t.gamma) {
        CHECK(std::isfinite(v));
        CHECK(v != 0.0);
      }
    }
  // csc(8 pi/4) has a true pole at (3, 2)
  CHECK_THROWS_AS(gamma_constants(3, 2), DomainError);
  // removable limits at mu2 = 2 mu1 and mu2 = 6 mu1 stay finite and nonzero
  for (auto [a, b] : {std::pair{1, 2}, std::pair{1, 6}}) {
    const double v = gamma_constants(a, b).gamma[2];
    CHECK(std::isfinite(v));
    CHECK(v != 0.0);
  }
}

TEST_CASE("lambda-tilde integrals cancel in the angular-radial product") {
  const QIntegrals q = Q_integrals(TodaParams::scaled(0, 0, 1e2));
  const std::array<double, 2>* v[] = {&q.A, &q.B, &q.C, &q.D, &q.E, &q.F, &q.G, &q.H};
  const std::array<double, 2>* a[] = {&q.A_abs, &q.B_abs, &q.C_abs, &q.D_abs,
                                      &q.E_abs, &q.F_abs, &q.G_abs, &q.H_abs};
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 2; ++j) {
      INFO("entry ", k, " j=", j + 1);
      CHECK(std::abs((*v[k])[j]) <= 1e-10 * (*a[k])[j]);
    }
  const QIntegrals q23 = Q_integrals(TodaParams::scaled(1, 2, 1e2));
  // c43 and c54 live on different modes when N1 != N2
  const double scale = q23.A_abs[0] + q23.E_abs[0];
  CHECK(std::abs(q23.B[0]) <= 1e-10 * scale);
  CHECK(std::abs(q23.F[0]) <= 1e-10 * scale);
}

TEST_CASE("Q assembly is linear") {
  QIntegrals q{};
  double x = 0.5;
  for (auto* arr : {&q.A, &q.B, &q.C, &q.D, &q.E, &q.F, &q.G, &q.H})
    for (double& e : *arr) e = (x += 0.75);
  const auto [Q1, Q2] = assemble_Q(q);
  CHECK(Q1.rows() == 12);
  CHECK(Q2.cols() == 12);
  QIntegrals h = q;
  for (auto* arr : {&h.A, &h.B, &h.C, &h.D, &h.E, &h.F, &h.G, &h.H})
    for (double& e : *arr) e *= 2;
  const auto [H1, H2] = assemble_Q(h);
  CHECK((H1 - 2 * Q1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((H2 - 2 * Q2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reduced Newton solve") {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(12, 12);
  for (int i = 0; i < 12; ++i) M(i, (i + 3) % 12) += 0.2;
  auto zero_proj = [&](const PerturbVector& a) {
    PerturbVector out{};
    Eigen::Map<const Eigen::VectorXd> av(a.data(), 12);
    Eigen::Map<Eigen::VectorXd>(out.data(), 12) = M * av;
    return out;
  };
  const ReducedSolve s0 = solve_reduced_a(M, zero_proj, 1e-14);
  CHECK(s0.iterations <= 1);
  for (double v : s0.a) CHECK(v == 0.0);

  Eigen::VectorXd b(12);
  for (int i = 0; i < 12; ++i) b[i] = 0.01 * (i - 5);
  auto affine = [&](const PerturbVector& a) {
    PerturbVector out{};
    Eigen::Map<const Eigen::VectorXd> av(a.data(), 12);
    Eigen::Map<Eigen::VectorXd>(out.data(), 12) = M * av + b + 0.1 * av.cwiseProduct(av);
    return out;
  };
  const ReducedSolve s = solve_reduced_a(M, affine, 1e-13);
  CHECK(s.residual <= 1e-13);
  const PerturbVector r = affine(s.a);
  for (double v : r) CHECK(std::abs(v) <= 1e-13);

  auto runaway = [&](const PerturbVector& a) {
    PerturbVector out{};
    for (int i = 0; i < 12; ++i) out[i] = 1.0 + std::exp(a[i]);
    return out;
  };
  CHECK_THROWS_AS(solve_reduced_a(M, runaway, 1e-12, 5), NoConvergenceError);
}
