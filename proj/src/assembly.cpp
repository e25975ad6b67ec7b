#include "g2toda/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "g2toda/errors.hpp"
#include "g2toda/kernels.hpp"
#include "g2toda/profiles.hpp"
#include "g2toda/reduced.hpp"
#include "g2toda/toda.hpp"

namespace g2toda {

namespace {

cplx node(const PolarGrid& g, int k, int j) { return std::polar(g.radial.r(k), g.theta(j)); }

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double norm2(const PerturbVector& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

bool is_symmetric(const TodaParams& p) {
  if (p.N1 != p.N2) return false;
  const TodaParams s = TodaParams::symmetric(p.N1);
  return std::abs(p.lambda4 - s.lambda4) <= 1e-14 * s.lambda4 && std::abs(p.lambda5 - s.lambda5) <= 1e-14 * s.lambda5;
}

// sum_j ln(|z - eps p_j|^2 / |z|^2)
double log_ratio(const std::vector<cplx>& pts, double eps, cplx z) {
  double s = 0.0;
  const double z2 = std::norm(z);
  for (auto pj : pts)
    if (pj != cplx(0.0)) s += std::log(std::norm(z - eps * pj) / z2);
  return s;
}

}  // namespace

PolarGrid default_polar_grid(const TodaParams& p, int modes, double r_max, int nodes) {
  const int M = modes > 0 ? modes : 4 * (p.mu1() + p.mu2());
  return PolarGrid{RadialGrid(1e-3, r_max, nodes), 2 * M + 1};
}

ApproxSolution build_approximation(const TodaParams& p, const PerturbVector& a, const CorrectionBundle& bundle,
                                   const VortexConfig& cfg, const PolarGrid& g, bool include_psi) {
  if (int(cfg.p.size()) != p.N1 || int(cfg.q.size()) != p.N2)
    throw ConfigError("vortex counts differ from N1, N2");
  ApproxSolution s;
  s.params = p;
  s.a = a;
  s.bundle = bundle;
  s.config = cfg;
  s.grid = g;
  s.include_psi = include_psi;
  const TodaFamily fam(p, a);
  s.toda_defect = fam.identity_residual();
  const int K = g.radial.size(), n = g.n_theta;
  s.Ub = Field2D::zeros(g);
  s.wb = Field2D::zeros(g);
  s.mixed_b = Eigen::MatrixXd::Zero(K, n);
  for (int k = 0; k < K; ++k) {
    const long double r = g.radial.r(k);
    for (int j = 0; j < n; ++j) {
      const cplx z = node(g, k, j);
      const auto [W, F] = fam.WF<long double>(z.real(), z.imag());
      s.Ub.c[0](k, j) = double(-std::log(2 * W));
      s.Ub.c[1](k, j) = double(-std::log(16 * F));
      s.wb.c[0](k, j) = double(ipow(r, 2 * p.N1) * 4 * F / (W * W));
      s.wb.c[1](k, j) = double(ipow(r, 2 * p.N2) * W * W * W / (32 * F * F));
      s.mixed_b(k, j) = double(ipow(r, 2 * (p.N1 + p.N2)) * W / (8 * F));
    }
  }
  const double eps = cfg.eps;
  s.corr = bundle.Psi0;
  for (int i = 0; i < 12; ++i)
    if (a[i] != 0.0) s.corr += a[i] * bundle.Psi[i];
  s.corr *= eps;
  if (include_psi) {
    s.corr += (eps * eps) * bundle.psi0;
    if (bundle.xi1 != 0.0) s.corr += (eps * eps * bundle.xi1) * kernel_field(p, KernelTag::Lambda4, g);
    if (bundle.xi2 != 0.0) s.corr += (eps * eps * bundle.xi2) * kernel_field(p, KernelTag::Lambda5, g);
  }
  s.V = s.Ub + s.corr;
  return s;
}

Field2D discrete_laplacian(const PolarGrid& g, const Field2D& f) {
  ModeProblem prob;
  prob.ncomp = 2;
  prob.coupling = [](int, double* C) { C[0] = C[1] = C[2] = C[3] = 0.0; };
  Field2D out = Field2D::zeros(g);
  for (int m = 0; m <= g.max_mode(); ++m)
    for (Parity par : {Parity::Cos, Parity::Sin}) {
      if (m == 0 && par == Parity::Sin) continue;
      prob.mode = m;
      add_mode(g, apply_mode_operator(prob, g.radial, extract_mode(g, f, m, par)), out);
    }
  return out;
}

ResidualReport residual_scaled(const ApproxSolution& sol, const Field2D* v, double alpha) {
  const PolarGrid& g = sol.grid;
  const double eps = sol.config.eps;
  const int K = g.radial.size(), n = g.n_theta;
  Field2D C = sol.corr;
  if (v) C += (eps * eps) * (*v);
  const Field2D lap = discrete_laplacian(g, C);
  ResidualReport rep;
  rep.R = Field2D::zeros(g);
  rep.E = Field2D::zeros(g);
  rep.mask = Eigen::MatrixXi::Ones(K, n);
  rep.mask.row(0).setZero();
  rep.mask.row(K - 1).setZero();
  const double dth = 2 * std::numbers::pi / n;
  for (int k = 1; k + 1 < K; ++k) {
    const double r = g.radial.r(k);
    const double disk = 3 * r * std::max(g.radial.h(), dth);
    int row_excluded = 0;
    for (int j = 0; j < n; ++j) {
      const cplx z = node(g, k, j);
      bool near = false;
      for (const auto* pts : {&sol.config.p, &sol.config.q})
        for (auto pj : *pts)
          if (pj != cplx(0.0) && std::abs(z - eps * pj) < disk) near = true;
      if (near) {
        rep.mask(k, j) = 0;
        ++rep.excluded;
        ++row_excluded;
        continue;
      }
      const double lf = log_ratio(sol.config.p, eps, z), lg = log_ratio(sol.config.q, eps, z);
      const double c1 = C.c[0](k, j), c2 = C.c[1](k, j);
      const double X1 = lf + 2 * c1 - c2, X2 = lg + 2 * c2 - 3 * c1;
      const double w1 = sol.wb.c[0](k, j), w2 = sol.wb.c[1](k, j);
      const double e1 = w1 * std::exp(X1), e2 = w2 * std::exp(X2);
      const double mx = sol.mixed_b(k, j) * std::exp(lf + lg + c2 - c1);
      const double S1 = 2 * e1 * e1 - mx, S2 = 2 * e2 * e2 - 3 * mx;
      const double R1 = lap.c[0](k, j) + w1 * std::expm1(X1) - eps * eps * S1;
      const double R2 = lap.c[1](k, j) + w2 * std::expm1(X2) - eps * eps * S2;
      rep.R.c[0](k, j) = R1;
      rep.R.c[1](k, j) = R2;
      rep.max_abs = std::max({rep.max_abs, std::abs(R1), std::abs(R2)});
    }
    if (row_excluded == n) throw ResolutionError("vortex disk covers a full circle of grid nodes");
  }
  if (eps > 0) rep.E = (-1.0 / (eps * eps)) * rep.R;
  rep.E_norms = weighted_norms(g, rep.E, alpha);
  return rep;
}

PerturbVector project_error(const ApproxSolution& sol, const ResidualReport& res) {
  PerturbVector out{};
  std::array<std::string, 12> err;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < 12; ++i) {
    try {
      const Field2D zs = adjoint_field(sol.params, kernel_tag(i + 2), sol.grid);
      out[i] = inner_product(sol.grid, res.E, zs);
      if (!std::isfinite(out[i])) throw QuadratureError("non-finite projection");
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  }
  for (const auto& e : err)
    if (!e.empty()) throw QuadratureError(e);
  return out;
}

namespace {

Field2D apply_L0(const PolarGrid& g, const GroundSamples& gs, const Field2D& v) {
  Field2D out = discrete_laplacian(g, v);
  for (int k = 0; k < g.radial.size(); ++k)
    for (int j = 0; j < g.n_theta; ++j) {
      const double v1 = v.c[0](k, j), v2 = v.c[1](k, j);
      out.c[0](k, j) += gs.w1[k] * (2 * v1 - v2);
      out.c[1](k, j) += gs.w2[k] * (2 * v2 - 3 * v1);
    }
  return out;
}

}  // namespace

ProjectedSolution solve_projected(const ApproxSolution& sol, int max_iter, double tol, double alpha) {
  const PolarGrid& g = sol.grid;
  const double eps = sol.config.eps;
  ProjectedSolution out;
  out.v = Field2D::zeros(g);
  if (eps == 0.0) {
    out.iterations = 1;
    out.v_norms = weighted_norms(g, out.v, alpha);
    return out;
  }
  const GroundSamples gs = ground_samples(sol.params, g.radial);
  for (int it = 1; it <= max_iter; ++it) {
    const ResidualReport res = residual_scaled(sol, &out.v, alpha);
    Field2D G = (1.0 / (eps * eps)) * res.R;
    const Field2D Lv = apply_L0(g, gs, out.v);
    for (int c = 0; c < 2; ++c) G.c[c] = (G.c[c] - Lv.c[c]).cwiseProduct(res.mask.cast<double>());
    const LinearSolve2D step = solve_linearized(sol.params, g, -1.0 * G);
    Field2D diff = step.phi;
    diff += -1.0 * out.v;
    out.update = diff.max_abs();
    out.v = step.phi;
    out.m = step.multipliers;
    out.iterations = it;
    out.history.push_back(out.update);
    if (!std::isfinite(out.update) || out.update > 1e8)
      throw NoConvergenceError("projected fixed point diverged at iteration " + std::to_string(it));
    if (out.update <= tol * std::max(1.0, out.v.max_abs())) break;
    if (it == max_iter)
      throw NoConvergenceError("projected fixed point did not converge, last update " + fmt_g(out.update));
  }
  out.v_norms = weighted_norms(g, out.v, alpha);
  const double nv = std::sqrt(inner_product(g, out.v, out.v));
  for (int i = 0; i < kNumKernels; ++i) {
    Field2D dz = kernel_field(sol.params, kernel_tag(i), g);
    for (int k = 0; k < g.radial.size(); ++k)
      for (int j = 0; j < g.n_theta; ++j) {
        const double z1 = dz.c[0](k, j), z2 = dz.c[1](k, j);
        dz.c[0](k, j) = -gs.w1[k] * (2 * z1 - z2);
        dz.c[1](k, j) = -gs.w2[k] * (2 * z2 - 3 * z1);
      }
    const double nd = std::sqrt(inner_product(g, dz, dz));
    if (nv > 0 && nd > 0) out.orthogonality = std::max(out.orthogonality, std::abs(inner_product(g, dz, out.v)) / (nd * nv));
  }
  return out;
}

std::pair<double, double> apply_G2(double t1, double t2) { return {2 * t1 - t2, -3 * t1 + 2 * t2}; }

namespace {

// 4-point Lagrange in ln r, trigonometric in theta; linear in ln r beyond the outer node
double sample_field(const PolarGrid& g, const Eigen::MatrixXd& f, double r, double theta) {
  const RadialGrid& R = g.radial;
  const int K = R.size(), n = g.n_theta;
  const double t = std::log(r);
  Eigen::VectorXd col(n);
  if (r >= R.r_max()) {
    const double s = (t - R.t(K - 1)) / R.h();
    col = f.row(K - 1).transpose() + s * (f.row(K - 1) - f.row(K - 2)).transpose();
  } else if (r <= R.r_min()) {
    col = f.row(0).transpose();
  } else {
    int k0 = int(std::floor((t - R.t(0)) / R.h())) - 1;
    k0 = std::clamp(k0, 0, K - 4);
    col.setZero();
    for (int a = 0; a < 4; ++a) {
      double l = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) l *= (t - R.t(k0 + b)) / (R.t(k0 + a) - R.t(k0 + b));
      col += l * f.row(k0 + a).transpose();
    }
  }
  if (n == 1) return col[0];
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x = theta - g.theta(j);
    const double s = std::sin(0.5 * x);
    acc += col[j] * (std::abs(s) < 1e-14 ? 1.0 : std::sin(0.5 * n * x) / (n * s));
  }
  return acc;
}

}  // namespace

std::vector<PhysicalSample> back_transform(const ApproxSolution& sol, const ProjectedSolution* proj,
                                           const std::vector<cplx>& zs) {
  const double eps = sol.config.eps;
  if (!(eps > 0)) throw ConfigError("back transform needs eps > 0");
  const TodaFamily fam(sol.params, sol.a);
  Field2D C = sol.corr;
  if (proj) C += (eps * eps) * proj->v;
  std::vector<PhysicalSample> out;
  out.reserve(zs.size());
  for (cplx z : zs) {
    const cplx zt = eps * z;
    const auto [W, F] = fam.WF<long double>(zt.real(), zt.imag());
    const double th = std::arg(zt), rt = std::abs(zt);
    const double t1 = double(-std::log(2 * W)) + sample_field(sol.grid, C.c[0], rt, th);
    const double t2 = double(-std::log(16 * F)) + sample_field(sol.grid, C.c[1], rt, th);
    const auto [U1, U2] = apply_G2(t1, t2);
    double s1 = 0.0, s2 = 0.0;
    for (auto pj : sol.config.p) s1 += std::log(std::norm(z - pj));
    for (auto qj : sol.config.q) s2 += std::log(std::norm(z - qj));
    out.push_back({z, s1 + U1 + (2 * sol.params.N1 + 2) * std::log(eps), s2 + U2 + (2 * sol.params.N2 + 2) * std::log(eps)});
  }
  return out;
}

DecayFit decay_exponents(const std::vector<double>& radii, const std::vector<double>& u1,
                         const std::vector<double>& u2) {
  const int n = int(radii.size());
  auto slope = [&](const std::vector<double>& u) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      const double x = std::log(radii[i]);
      sx += x;
      sy += u[i];
      sxx += x * x;
      sxy += x * u[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  DecayFit d;
  d.alpha1 = -slope(u1) / 2;
  d.alpha2 = -slope(u2) / 2;
  d.monotone = true;
  for (int i = 1; i < n; ++i)
    if (!(u1[i] < u1[i - 1]) || !(u2[i] < u2[i - 1])) d.monotone = false;
  return d;
}

DecayFit decay_exponents(const ApproxSolution& sol, const ProjectedSolution* proj, double R1, double R2, int n) {
  const auto radii = geometric_radii(R1, R2, n);
  const int na = 8;
  std::vector<double> u1(n, 0.0), u2(n, 0.0);
  for (int i = 0; i < n; ++i) {
    std::vector<cplx> zs;
    for (int j = 0; j < na; ++j) zs.push_back(std::polar(radii[i], 2 * std::numbers::pi * (j + 0.5) / na));
    for (const auto& s : back_transform(sol, proj, zs)) {
      u1[i] += s.u1 / na;
      u2[i] += s.u2 / na;
    }
  }
  return decay_exponents(radii, u1, u2);
}

Eigen::MatrixXd reduced_matrix(const TodaParams& p, const VortexConfig& cfg, const CorrectionBundle& bundle,
                               const PolarGrid& g) {
  if (is_symmetric(p) && p.N1 >= 1) return std::numbers::pi * assemble_T(T_entries(p.N1).T);
  Eigen::MatrixXd M(12, 12);
  const double h = 1e-4;
  for (int i = 0; i < 12; ++i) {
    PerturbVector ap{}, am{};
    ap[i] = h;
    am[i] = -h;
    const ApproxSolution sp = build_approximation(p, ap, bundle, cfg, g);
    const ApproxSolution sm = build_approximation(p, am, bundle, cfg, g);
    const PerturbVector fp = project_error(sp, residual_scaled(sp)), fm = project_error(sm, residual_scaled(sm));
    for (int r = 0; r < 12; ++r) M(r, i) = (fp[r] - fm[r]) / (2 * h);
  }
  return M;
}

AssemblyReport run_assembly(const TodaParams& p, const VortexConfig& cfg_in, const AssemblyOptions& opt,
                            ApproxSolution* out) {
  p.validate();
  if (int(cfg_in.p.size()) != p.N1 || int(cfg_in.q.size()) != p.N2)
    throw ConfigError("vortex file lists " + std::to_string(cfg_in.p.size()) + " and " +
                      std::to_string(cfg_in.q.size()) + " points, expected N1 = " + std::to_string(p.N1) +
                      " and N2 = " + std::to_string(p.N2));
  const RegimeInfo info = classify(cfg_in);
  AssemblyReport rep;
  rep.params = p;
  rep.regime = info.regime;
  rep.config = info.case_a ? translated(cfg_in, info.shift) : cfg_in;
  if (info.case_a && std::abs(info.shift) > 0) rep.notes.push_back("translated so that both vortex sums vanish");
  rep.radial_shortcut = p.N1 == 0 && p.N2 == 0;
  const double eps = rep.config.eps;
  PolarGrid g = default_polar_grid(p, opt.modes, opt.r_max, opt.nodes);
  if (rep.radial_shortcut) {
    g.n_theta = 1;
    rep.notes.push_back("radial shortcut");
  }
  const CorrectionBundle bundle = build_corrections(p, rep.config, info.regime, g, opt.xi1, opt.xi2);
  auto build = [&](const PerturbVector& a) { return build_approximation(p, a, bundle, rep.config, g, opt.include_psi); };
  auto proj = [&](const PerturbVector& a) {
    const ApproxSolution s = build(a);
    return project_error(s, residual_scaled(s));
  };
  if (!rep.radial_shortcut) {
    rep.projection_at_zero = proj(PerturbVector{});
    const Eigen::MatrixXd M = reduced_matrix(p, rep.config, bundle, g);
    const ReducedSolve rs = solve_reduced_a(M, proj, std::max(opt.reduced_tol, 1e-3 * eps * eps));
    rep.a = rs.a;
    rep.reduced_iterations = rs.iterations;
  }
  rep.a_norm = norm2(rep.a);
  ApproxSolution sol = build(rep.a);
  const ResidualReport res = residual_scaled(sol);
  if (!rep.radial_shortcut) rep.projection_at_a = project_error(sol, res);
  rep.residual_norm = res.E_norms.norm_starstar;
  rep.residual_max = res.max_abs;
  rep.excluded = res.excluded;
  ProjectedSolution ps;
  bool have_v = false;
  if (opt.run_projected) {
    try {
      ps = solve_projected(sol);
      have_v = true;
      rep.projected_converged = true;
      rep.v_norm_star = ps.v_norms.norm_star;
      rep.v_iterations = ps.iterations;
    } catch (const NoConvergenceError& e) {
      rep.projected_error = e.what();
    }
  }
  if (eps > 0) rep.decay = decay_exponents(sol, have_v ? &ps : nullptr, 0.05 * opt.r_max / eps, 0.5 * opt.r_max / eps);
  if (out) *out = std::move(sol);
  return rep;
}

}  // namespace g2toda
