#include "g2toda/corrections.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "g2toda/errors.hpp"
#include "g2toda/fd.hpp"
#include "g2toda/kernels.hpp"
#include "g2toda/precision.hpp"
#include "g2toda/profiles.hpp"

namespace g2toda {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::I: return "i";
    case Regime::II: return "ii";
    case Regime::III: return "iii";
  }
  return "?";
}

RegimeInfo classify(const VortexConfig& cfg, double tol) {
  const int N1 = int(cfg.p.size()), N2 = int(cfg.q.size());
  cplx sp(0.0), sq(0.0);
  double scale = 1.0;
  for (auto z : cfg.p) sp += z, scale += std::abs(z);
  for (auto z : cfg.q) sq += z, scale += std::abs(z);
  RegimeInfo info;
  info.case_a = std::abs(double(N2) * sp - double(N1) * sq) <= tol * scale * (1 + N1 + N2);
  info.case_b = !info.case_a && N1 > 1 && N2 > 1 && std::abs(N1 - N2) != 1;
  if (!info.case_a && !info.case_b)
    throw ConfigError("vortex configuration satisfies neither N2 sum p = N1 sum q nor the generic case conditions");
  if (info.case_a) {
    if (N1 > 0)
      info.shift = sp / double(N1);
    else if (N2 > 0)
      info.shift = sq / double(N2);
  }
  if (N1 == N2)
    info.regime = Regime::I;
  else if (N1 == 1 || N2 == 1)
    info.regime = Regime::III;
  else
    info.regime = Regime::II;
  return info;
}

VortexConfig translated(const VortexConfig& cfg, cplx shift) {
  VortexConfig out = cfg;
  for (auto& z : out.p) z -= shift;
  for (auto& z : out.q) z -= shift;
  return out;
}

double vortex_poly(const std::vector<cplx>& pts, double eps, cplx z) {
  double f = 1.0;
  for (auto pj : pts) f *= std::norm(z - eps * pj);
  return f;
}

namespace {

// prod (z - eps p_j) = A0 + A1 eps + A2 eps^2 + ...
std::array<double, 3> taylor_one(const std::vector<cplx>& pts, cplx z) {
  cplx a0(1.0), a1(0.0), a2(0.0);
  for (auto pj : pts) {
    a2 = a2 * z - a1 * pj;
    a1 = a1 * z - a0 * pj;
    a0 = a0 * z;
  }
  return {std::norm(a0), 2 * std::real(a0 * std::conj(a1)), 2 * (std::norm(a1) + 2 * std::real(a0 * std::conj(a2)))};
}

}  // namespace

VortexTaylor vortex_taylor(const VortexConfig& cfg, cplx z) {
  const auto f = taylor_one(cfg.p, z);
  const auto g = taylor_one(cfg.q, z);
  return {f[0], f[1], f[2], g[0], g[1], g[2]};
}

Field2D kernel_field(const TodaParams& p, KernelTag tag, const PolarGrid& g) {
  const auto L = make_lambdas<long double>(p);
  const GroundState<long double> gs(p);
  const int m = kernel_mode(tag, p.mu1(), p.mu2());
  const bool s = kernel_is_sine(tag);
  Field2D f = Field2D::zeros(g);
  for (int k = 0; k < g.radial.size(); ++k) {
    const auto rk = radial_kernel(L, gs, kernel_shape(tag), g.radial.r(k));
    for (int j = 0; j < g.n_theta; ++j) {
      const double a = s ? std::sin(m * g.theta(j)) : std::cos(m * g.theta(j));
      f.c[0](k, j) = rk.z1 * a;
      f.c[1](k, j) = rk.z2 * a;
    }
  }
  return f;
}

Field2D adjoint_field(const TodaParams& p, KernelTag tag, const PolarGrid& g) {
  Field2D z = kernel_field(p, tag, g);
  Field2D out = z;
  out.c[0] = 2 * z.c[0] - z.c[1];
  out.c[1] = (2.0 / 3.0) * z.c[1] - z.c[0];
  return out;
}

GroundSamples ground_samples(const TodaParams& p, const RadialGrid& g) {
  const GroundState<long double> gs(p);
  GroundSamples s;
  for (int k = 0; k < g.size(); ++k) {
    const long double r = g.r(k);
    const long double a = rho1_inv(gs.L, r), b = rho2_inv(gs.L, r);
    s.w1.push_back(double(gs.w1(r)));
    s.w2.push_back(double(gs.w2(r)));
    s.mixed.push_back(double(ipow(r, 2 * (p.N1 + p.N2)) * a / (2 * b)));
    s.U1.push_back(double(-std::log(2 * a)));
    s.U2.push_back(double(-std::log(4 * b)));
  }
  return s;
}

double projection_defect(const TodaParams& p, const PolarGrid& g, const Field2D& rhs, int* worst) {
  const double nr = std::sqrt(inner_product(g, rhs, rhs));
  double out = 0.0;
  if (nr == 0.0) return 0.0;
  for (int i = 2; i < kNumKernels; ++i) {
    // modes above the grid's Nyquist limit alias onto lower ones
    if (kernel_mode(kernel_tag(i), p.mu1(), p.mu2()) > g.max_mode()) continue;
    const Field2D zs = adjoint_field(p, kernel_tag(i), g);
    const double v = std::abs(inner_product(g, rhs, zs)) / (nr * std::sqrt(inner_product(g, zs, zs)));
    if (v > out) {
      out = v;
      if (worst) *worst = i;
    }
  }
  return out;
}

namespace {

cplx node(const PolarGrid& g, int k, int j) { return std::polar(g.radial.r(k), g.theta(j)); }

bool has_first_order(const VortexConfig& cfg) {
  cplx sp(0.0), sq(0.0);
  for (auto z : cfg.p) sp += z;
  for (auto z : cfg.q) sq += z;
  return std::abs(sp) > 1e-14 || std::abs(sq) > 1e-14;
}

}  // namespace

Field2D Psi0_rhs(const TodaParams& p, const VortexConfig& cfg, const PolarGrid& g) {
  const auto gs = ground_samples(p, g.radial);
  Field2D f = Field2D::zeros(g);
  for (int k = 0; k < g.radial.size(); ++k) {
    const double r = g.radial.r(k);
    const double e1 = gs.w1[k] / ipow(r, 2 * p.N1), e2 = gs.w2[k] / ipow(r, 2 * p.N2);
    for (int j = 0; j < g.n_theta; ++j) {
      const auto t = vortex_taylor(cfg, node(g, k, j));
      f.c[0](k, j) = -t.f_eps * e1;
      f.c[1](k, j) = -t.g_eps * e2;
    }
  }
  return f;
}

Field2D solve_Psi0(const TodaParams& p, const VortexConfig& cfg, const PolarGrid& g) {
  if (!has_first_order(cfg)) return Field2D::zeros(g);
  return solve_linearized(p, g, Psi0_rhs(p, cfg, g)).phi;
}

Field2D Psi_i_rhs(const TodaParams& p, const VortexConfig& cfg, const Field2D& Psi0, KernelTag tag, const PolarGrid& g) {
  const auto gs = ground_samples(p, g.radial);
  const Field2D Z = kernel_field(p, tag, g);
  Field2D f = Field2D::zeros(g);
  for (int k = 0; k < g.radial.size(); ++k) {
    const double r = g.radial.r(k);
    const double e1 = gs.w1[k] / ipow(r, 2 * p.N1), e2 = gs.w2[k] / ipow(r, 2 * p.N2);
    for (int j = 0; j < g.n_theta; ++j) {
      const auto t = vortex_taylor(cfg, node(g, k, j));
      const double a1 = 2 * Z.c[0](k, j) - Z.c[1](k, j), a2 = 2 * Z.c[1](k, j) - 3 * Z.c[0](k, j);
      const double b1 = 2 * Psi0.c[0](k, j) - Psi0.c[1](k, j), b2 = 2 * Psi0.c[1](k, j) - 3 * Psi0.c[0](k, j);
      f.c[0](k, j) = -gs.w1[k] * b1 * a1 - t.f_eps * e1 * a1;
      f.c[1](k, j) = -gs.w2[k] * b2 * a2 - t.g_eps * e2 * a2;
    }
  }
  return f;
}

Field2D solve_Psi_i(const TodaParams& p, const VortexConfig& cfg, const Field2D& Psi0, KernelTag tag,
                    const PolarGrid& g, double tol) {
  if (perturb_index(tag) < 0) throw ConfigError("Psi_i is defined for the c kernels only");
  if (!has_first_order(cfg) && Psi0.max_abs() == 0.0) return Field2D::zeros(g);
  const Field2D rhs = Psi_i_rhs(p, cfg, Psi0, tag, g);
  int worst = -1;
  const double d = projection_defect(p, g, rhs, &worst);
  if (d > tol)
    throw SolvabilityError("right-hand side for " + kernel_name(tag) + " has projection " + std::to_string(d) +
                           " on " + kernel_name(kernel_tag(worst)) + "*");
  return solve_linearized(p, g, rhs).phi;
}

Field2D psi_rhs(const TodaParams& p, const VortexConfig& cfg, const Field2D& Psi0, Regime regime, const PolarGrid& g) {
  const auto gs = ground_samples(p, g.radial);
  Field2D f = Field2D::zeros(g);
  for (int k = 0; k < g.radial.size(); ++k) {
    const double r = g.radial.r(k);
    const double S1 = 2 * gs.w1[k] * gs.w1[k] - gs.mixed[k];
    const double S2 = 2 * gs.w2[k] * gs.w2[k] - 3 * gs.mixed[k];
    const double e1 = gs.w1[k] / ipow(r, 2 * p.N1), e2 = gs.w2[k] / ipow(r, 2 * p.N2);
    for (int j = 0; j < g.n_theta; ++j) {
      f.c[0](k, j) = S1;
      f.c[1](k, j) = S2;
      if (regime == Regime::III) continue;
      const auto t = vortex_taylor(cfg, node(g, k, j));
      const double b1 = 2 * Psi0.c[0](k, j) - Psi0.c[1](k, j), b2 = 2 * Psi0.c[1](k, j) - 3 * Psi0.c[0](k, j);
      f.c[0](k, j) += -0.5 * gs.w1[k] * b1 * b1 - t.f_eps * e1 * b1 - 0.5 * t.f_epseps * e1;
      f.c[1](k, j) += -0.5 * gs.w2[k] * b2 * b2 - t.g_eps * e2 * b2 - 0.5 * t.g_epseps * e2;
    }
  }
  return f;
}

Field2D solve_psi(const TodaParams& p, const VortexConfig& cfg, const Field2D& Psi0, Regime regime,
                  const PolarGrid& g, double tol) {
  const Field2D rhs = psi_rhs(p, cfg, Psi0, regime, g);
  int worst = -1;
  const double d = projection_defect(p, g, rhs, &worst);
  if (d > tol)
    throw SolvabilityError("second-order right-hand side has projection " + std::to_string(d) + " on " +
                           kernel_name(kernel_tag(worst)) + "*");
  return solve_linearized(p, g, rhs).phi;
}

CorrectionBundle build_corrections(const TodaParams& p, const VortexConfig& cfg, Regime regime, const PolarGrid& g,
                                   double xi1, double xi2) {
  CorrectionBundle b;
  b.regime = regime;
  b.xi1 = xi1;
  b.xi2 = xi2;
  b.Psi0 = solve_Psi0(p, cfg, g);
  b.Psi_zero = !has_first_order(cfg);
  for (int i = 0; i < 12; ++i)
    b.Psi[i] = b.Psi_zero ? Field2D::zeros(g) : solve_Psi_i(p, cfg, b.Psi0, kernel_tag(i + 2), g);
  b.psi0 = solve_psi(p, cfg, b.Psi0, regime, g);
  return b;
}

double symmetric_weight(int N, double r) {
  const int mu = N + 1;
  const double x = ipow(r, 2 * mu);
  return 8.0 * mu * mu * ipow(r, 2 * N) / ((1 + x) * (1 + x));
}

double symmetric_source(int N, double r) {
  const int mu = N + 1;
  const double x = ipow(r, 2 * mu);
  return 3.0 * 64.0 * ipow(double(mu), 4) * ipow(r, 4 * N) / ipow(1 + x, 4);
}

namespace {

ScalarSolution scalar_solve(int N, const RadialGrid& grid) {
  const int K = grid.size(), mu = N + 1;
  ModeProblem prob;
  prob.ncomp = 1;
  prob.mode = 0;
  std::vector<double> V(K);
  DeflationVector d;
  d.dz.assign(1, Eigen::VectorXd(K));
  d.zstar.assign(1, Eigen::VectorXd(K));
  d.multiplier = false;
  ModeField rhs{0, Parity::Cos, {Eigen::VectorXd(K)}};
  for (int k = 0; k < K; ++k) {
    const double r = grid.r(k), x = ipow(r, 2 * mu);
    V[k] = symmetric_weight(N, r);
    const double phi0 = (1 - x) / (1 + x);
    d.dz[0][k] = -V[k] * phi0;
    d.zstar[0][k] = phi0;
    rhs.comp[0][k] = symmetric_source(N, r);
  }
  prob.coupling = [V](int k, double* C) { C[0] = V[k]; };
  prob.deflate.push_back(std::move(d));
  const auto sol = solve_mode_problem(prob, grid, rhs);
  return {grid, sol.phi.comp[0], sol.slopes.at(0)};
}

}  // namespace

ScalarSolution solve_psi_symmetric(int N, const RadialGrid& grid, bool richardson) {
  if (N < 1) throw DomainError("the symmetric second-order problem needs N >= 1");
  ScalarSolution coarse = scalar_solve(N, grid);
  if (!richardson) return coarse;
  const ScalarSolution fine = scalar_solve(N, grid.refined());
  for (int k = 0; k < grid.size(); ++k) coarse.psi[k] = (4 * fine.psi[2 * k] - coarse.psi[k]) / 3;
  coarse.slope = (4 * fine.slope - coarse.slope) / 3;
  return coarse;
}

double psi_symmetric(int N, double r) {
  static std::mutex mtx;
  static std::map<int, ScalarSolution> cache;
  const ScalarSolution* s;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(N);
    if (it == cache.end()) it = cache.emplace(N, solve_psi_symmetric(N, RadialGrid())).first;
    s = &it->second;
  }
  const auto& g = s->grid;
  const int K = g.size();
  if (r <= g.r_min()) return s->psi[0];
  if (r >= g.r_max()) return s->psi[K - 1] + s->slope * std::log(r / g.r_max());
  // four-point Lagrange interpolation in ln r
  const double u = (std::log(r) - g.t(0)) / g.h();
  int k0 = std::clamp(int(std::floor(u)) - 1, 0, K - 4);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (u - (k0 + b)) / double(a - b);
    acc += w * s->psi[k0 + a];
  }
  return acc;
}

PhiTable phi_table(int i) {
  switch (i) {
    case 1: return {-1, 8, {1, 8, 108, -304, 1435, -1584, 1393, -352, 81}};
    case 2: return {-2, 5, {1, 8, 27, 48, 392, -336, 350}};
    case 3: return {-1, 10, {1, 8, 27, 398, -833, 1764, -875, 350}};
    case 4: return {-2, 45, {1, 8, 172, -592, 2527, -2896, 2485, -640, 145}};
    case 5: return {-5, 54, {1, 8, 27, 48, 42}};
    case 6: return {-4, 135, {1, 8, 27, 48, 42, 189}};
  }
  throw DomainError("phi table index must lie in 1..6");
}

namespace {

template <class T>
T phi_from_table(int N, const PhiTable& tab, T r) {
  const T x = ipow(r, 2 * (N + 1));
  T acc(0);
  for (int k = int(tab.coef.size()) - 1; k >= 0; --k) acc = acc * x + T(tab.coef[k]);
  const T s = T(tab.num) / T(tab.den);
  return s * acc / ipow(T(1) + x, 10);
}

}  // namespace

template <class T>
T q_eval_t(int N, int i, T r) {
  const int mu = N + 1;
  const T x = ipow(r, 2 * mu);
  const T d = ipow(x + 1, 12);
  const T p = T(mu * mu) * ipow(r, 2 * N);
  auto sq = [](T v) { return v * v; };
  switch (i) {
    case 1:
      return -18 * p * x / d *
             (-178 * x + 1252 * ipow(x, 2) - 3746 * ipow(x, 3) + 5380 * ipow(x, 4) - 3746 * ipow(x, 5) +
              1252 * ipow(x, 6) - 178 * ipow(x, 7) + 9 * ipow(x, 8) + 9);
    case 2: return -2240 * p * ipow(x, 3) / d * sq(-5 * x + 2 * x * x + 2);
    case 3: return -1260 * p * x * x / d * sq(5 * x - 5 * x * x + ipow(x, 3) - 1);
    case 4:
      return -T(32) * p * x / (9 * d) *
             (-578 * x + 4052 * ipow(x, 2) - 12146 * ipow(x, 3) + 17420 * ipow(x, 4) - 12146 * ipow(x, 5) +
              4052 * ipow(x, 6) - 578 * ipow(x, 7) + 29 * ipow(x, 8) + 29);
    case 5: return -560 * p * ipow(x, 5) / d;
    case 6: return -560 * p * ipow(x, 4) * sq(x - 1) / d;
    case 7:
      return 16 * p * x / d * (-11 * x + 21 * x * x - 11 * ipow(x, 3) + ipow(x, 4) + 1) *
             (-73 * x + 153 * x * x - 73 * ipow(x, 3) + 8 * ipow(x, 4) + 8);
  }
  throw DomainError("q index must lie in 1..7");
}

template <class T>
T phi_eval_t(int N, int i, T r) {
  if (i == 7) {
    const T x = ipow(r, 2 * (N + 1));
    return x * x *
           (16 * ipow(x, 6) - 72 * ipow(x, 5) + 273 * ipow(x, 4) - 328 * ipow(x, 3) + 273 * x * x - 72 * x + 16) /
           (2 * ipow(1 + x, 10));
  }
  return phi_from_table<T>(N, phi_table(i), r);
}

template double q_eval_t<double>(int, int, double);
template long double q_eval_t<long double>(int, int, long double);
template f128 q_eval_t<f128>(int, int, f128);
template double phi_eval_t<double>(int, int, double);
template long double phi_eval_t<long double>(int, int, long double);
template f128 phi_eval_t<f128>(int, int, f128);

double q_eval(int N, int i, double r) { return double(q_eval_t<long double>(N, i, r)); }
double phi_eval(int N, int i, double r) { return double(phi_eval_t<long double>(N, i, r)); }

double verify_phi_ode(int N, int i, const std::vector<double>& radii, const PhiTable* table) {
  const int mu = N + 1;
  auto phi = [&](f128 r) { return table ? phi_from_table<f128>(N, *table, r) : phi_eval_t<f128>(N, i, r); };
  double qmax = 0.0;
  for (double r : radii) qmax = std::max(qmax, std::abs(q_eval(N, i, r)));
  if (qmax == 0.0) throw DomainError("q vanishes on the sample radii");
  double worst = 0.0;
  for (double rd : radii) {
    const f128 t0 = log(f128(rd));
    const f128 r = exp(t0);
    const auto dtt = second_derivative([&](f128 t) { return phi(exp(t)); }, t0, f128(2e-3));
    const f128 x = ipow(r, 2 * mu);
    const f128 V = f128(8 * mu * mu) * ipow(r, 2 * N) / ((1 + x) * (1 + x));
    const f128 res = dtt.first / (r * r) + V * phi(r) - q_eval_t<f128>(N, i, r);
    if (double(dtt.second / (r * r)) > 1e-4 * qmax) throw ResolutionError("phi ODE check not resolved");
    worst = std::max(worst, double(abs(res)) / qmax);
  }
  return worst;
}

DualityCheck duality(int N, int i) {
  const RadialGrid grid;
  const ScalarSolution s = solve_psi_symmetric(N, grid);
  DualityCheck d{};
  for (int k = 0; k < grid.size(); ++k) {
    const double r = grid.r(k);
    d.psi_q += grid.weight(k) * r * r * s.psi[k] * q_eval(N, i, r);
  }
  d.src_phi = integrate_halfline([&](double r) { return symmetric_source(N, r) * phi_eval(N, i, r) * r; }, 1e-12).value;
  d.rel = std::abs(d.psi_q - d.src_phi) / std::abs(d.psi_q);
  return d;
}

}  // namespace g2toda
