#include "g2toda/numerics.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <memory>
#include <string>

#include "g2toda/errors.hpp"
#include "g2toda/kernels.hpp"

namespace g2toda {

using boost::math::quadrature::gauss_kronrod;

Quadrature integrate_halfline(const std::function<double(double)>& f, double tol, int max_depth) {
  auto g = [&](double t) {
    const double om = 1.0 - t;
    const double v = f(t / om) / (om * om);
    return std::isfinite(v) ? v : 0.0;
  };
  double err = 0.0, l1 = 0.0;
  const double val = gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, max_depth, tol, &err, &l1);
  if (!std::isfinite(val) || err > std::max(10 * tol * std::abs(val), 1e-10 * l1))
    throw QuadratureError("half-line quadrature did not converge: value " + std::to_string(val) + ", error " +
                          std::to_string(err));
  return {val, err};
}

Quadrature integrate_log(const std::function<double(double)>& f, double a, double b, double tol) {
  const double sa = std::log(a), sb = std::log(b);
  const int panels = std::max(1, int(std::ceil(sb - sa)));
  auto g = [&](double s) {
    const double r = std::exp(s);
    return f(r) * r;
  };
  Quadrature q;
  double l1tot = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = sa + (sb - sa) * i / panels, hi = sa + (sb - sa) * (i + 1) / panels;
    double err = 0.0, l1 = 0.0;
    q.value += gauss_kronrod<double, 31>::integrate(g, lo, hi, 15, tol, &err, &l1);
    q.error += err;
    l1tot += l1;
  }
  if (!std::isfinite(q.value) || q.error > std::max(10 * tol * std::abs(q.value), 1e-12 * l1tot))
    throw QuadratureError("log-panel quadrature did not converge");
  return q;
}

RadialGrid::RadialGrid(double r_min, double r_max, int nodes) {
  if (!(r_min > 0) || !(r_max > r_min) || nodes < 8) throw ConfigError("invalid radial grid");
  t0_ = std::log(r_min);
  h_ = (std::log(r_max) - t0_) / (nodes - 1);
  r_.resize(nodes);
  for (int k = 0; k < nodes; ++k) r_[k] = std::exp(t0_ + h_ * k);
  r_.back() = r_max;
}

ModeField laplacian_mode(const ModeField& f, const RadialGrid& grid) {
  const int n = grid.size();
  const double h2 = 12.0 * grid.h() * grid.h();
  const double m2 = double(f.mode) * f.mode;
  ModeField out{f.mode, f.parity, {}};
  for (const auto& v : f.comp) {
    Eigen::VectorXd d(n);
    for (int k = 2; k + 2 < n; ++k) d[k] = (-v[k - 2] + 16 * v[k - 1] - 30 * v[k] + 16 * v[k + 1] - v[k + 2]) / h2;
    auto edge = [&](int k0, int s) {
      auto F = [&](int j) { return v[k0 + s * j]; };
      d[k0] = (45 * F(0) - 154 * F(1) + 214 * F(2) - 156 * F(3) + 61 * F(4) - 10 * F(5)) / h2;
      d[k0 + s] = (10 * F(0) - 15 * F(1) - 4 * F(2) + 14 * F(3) - 6 * F(4) + F(5)) / h2;
    };
    edge(0, 1);
    edge(n - 1, -1);
    for (int k = 0; k < n; ++k) {
      const double r = grid.r(k);
      d[k] = (d[k] - m2 * v[k]) / (r * r);
    }
    out.comp.push_back(std::move(d));
  }
  return out;
}

WeightedNormReport weighted_norms(const std::vector<double>& radii, const std::vector<double>& values, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must lie in (0,1)");
  WeightedNormReport w;
  w.alpha = alpha;
  for (size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k], a = std::abs(values[k]);
    w.norm_star = std::max(w.norm_star, a / std::log(2 + r));
    w.norm_starstar = std::max(w.norm_starstar, std::pow(1 + r, 2 + alpha) * a);
  }
  return w;
}

Field2D Field2D::zeros(const PolarGrid& g) {
  Field2D f;
  for (auto& m : f.c) m = Eigen::MatrixXd::Zero(g.radial.size(), g.n_theta);
  return f;
}

Field2D& Field2D::operator+=(const Field2D& o) {
  c[0] += o.c[0];
  c[1] += o.c[1];
  return *this;
}

Field2D& Field2D::operator*=(double s) {
  c[0] *= s;
  c[1] *= s;
  return *this;
}

double Field2D::max_abs() const { return std::max(c[0].cwiseAbs().maxCoeff(), c[1].cwiseAbs().maxCoeff()); }

Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
Field2D operator*(double s, Field2D a) { return a *= s; }

WeightedNormReport weighted_norms(const PolarGrid& g, const Field2D& f, double alpha) {
  std::vector<double> radii, vals;
  const auto& R = g.radial.radii();
  for (int k = 0; k < g.radial.size(); ++k) {
    double m = 0.0;
    for (int c = 0; c < 2; ++c) m = std::max(m, f.c[c].row(k).cwiseAbs().maxCoeff());
    radii.push_back(R[k]);
    vals.push_back(m);
  }
  return weighted_norms(radii, vals, alpha);
}

ModeField extract_mode(const PolarGrid& g, const Field2D& f, int m, Parity parity) {
  const int n = g.n_theta, K = g.radial.size();
  Eigen::VectorXd basis(n);
  for (int j = 0; j < n; ++j) {
    const double th = g.theta(j);
    basis[j] = parity == Parity::Sin ? std::sin(m * th) : std::cos(m * th);
  }
  if (m == 0 && parity == Parity::Sin) basis.setZero();
  const double norm = (m == 0 ? 1.0 : 2.0) / n;
  ModeField out{m, parity, {}};
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd v(K);
    v.noalias() = norm * (f.c[c] * basis);
    out.comp.push_back(std::move(v));
  }
  return out;
}

void add_mode(const PolarGrid& g, const ModeField& mf, Field2D& f) {
  const int n = g.n_theta;
  Eigen::RowVectorXd basis(n);
  for (int j = 0; j < n; ++j) {
    const double th = g.theta(j);
    basis[j] = mf.parity == Parity::Sin ? std::sin(mf.mode * th) : std::cos(mf.mode * th);
  }
  for (int c = 0; c < 2 && c < int(mf.comp.size()); ++c) f.c[c].noalias() += mf.comp[c] * basis;
}

double inner_product(const PolarGrid& g, const Field2D& a, const Field2D& b) {
  double acc = 0.0;
  const double dth = 2.0 * std::numbers::pi / g.n_theta;
  for (int k = 0; k < g.radial.size(); ++k) {
    const double r = g.radial.r(k);
    double s = 0.0;
    for (int c = 0; c < 2; ++c) s += a.c[c].row(k).dot(b.c[c].row(k));
    acc += g.radial.weight(k) * r * r * s;
  }
  return acc * dth;
}

namespace {

double dot_radial(const RadialGrid& grid, const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  double acc = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double r = grid.r(k);
    double s = 0.0;
    for (size_t c = 0; c < a.size(); ++c) s += a[c][k] * b[c][k];
    acc += grid.weight(k) * r * r * s;
  }
  return acc;
}

}  // namespace

ModeSolution solve_mode_problem(const ModeProblem& prob, const RadialGrid& grid, const ModeField& rhs) {
  const int nc = prob.ncomp, K = grid.size(), m = prob.mode;
  const double h = grid.h();
  if (int(rhs.comp.size()) != nc) throw ConfigError("right-hand side has the wrong number of components");
  if (!prob.borders) {
    for (const auto& d : prob.deflate) {
      if (!d.multiplier) continue;
      const double ip = dot_radial(grid, rhs.comp, d.zstar);
      double na = 0.0, nb = 0.0;
      for (int c = 0; c < nc; ++c) {
        na += dot_radial(grid, {rhs.comp[c].cwiseAbs()}, {rhs.comp[c].cwiseAbs()});
        nb += dot_radial(grid, {d.zstar[c]}, {d.zstar[c]});
      }
      if (std::abs(ip) > prob.orth_tol * std::sqrt(na * nb))
        throw NonOrthogonalRhsError("right-hand side not orthogonal to the adjoint kernels");
    }
  }
  std::vector<int> mult_ids, cons_ids;
  if (prob.borders) {
    for (int i = 0; i < int(prob.deflate.size()); ++i) {
      cons_ids.push_back(i);
      if (prob.deflate[i].multiplier) mult_ids.push_back(i);
    }
  }
  const int nslope = m == 0 ? (prob.borders ? nc : 0) : 0;
  const int nbase = nc * K;
  const int nmult = int(mult_ids.size());
  const int nunk = nbase + nslope + nmult;
  const int ncons = int(cons_ids.size());
  if (nbase + ncons != nunk) throw SingularSystemError("bordered system is not square");

  // column scaling of the multipliers
  std::vector<double> mscale(nmult, 1.0);
  for (int q = 0; q < nmult; ++q) {
    double mx = 0.0;
    for (int c = 0; c < nc; ++c)
      for (int k = 0; k < K; ++k) mx = std::max(mx, std::abs(grid.r(k) * grid.r(k) * prob.deflate[mult_ids[q]].zstar[c][k]));
    mscale[q] = mx > 0 ? 1.0 / mx : 1.0;
  }

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nunk);
  auto id = [&](int k, int c) { return k * nc + c; };
  std::vector<double> C(nc * nc);
  const double ih2 = 1.0 / (h * h);
  for (int k = 0; k < K; ++k) {
    const double r2 = grid.r(k) * grid.r(k);
    if (k > 0 && k + 1 < K) prob.coupling(k, C.data());
    for (int c = 0; c < nc; ++c) {
      const int row = id(k, c);
      if (k == 0) {
        trip.emplace_back(row, id(0, c), -1.5 / h - m);
        trip.emplace_back(row, id(1, c), 2.0 / h);
        trip.emplace_back(row, id(2, c), -0.5 / h);
      } else if (k + 1 == K) {
        trip.emplace_back(row, id(K - 1, c), 1.5 / h + m);
        trip.emplace_back(row, id(K - 2, c), -2.0 / h);
        trip.emplace_back(row, id(K - 3, c), 0.5 / h);
        if (nslope) trip.emplace_back(row, nbase + c, -1.0);
      } else {
        trip.emplace_back(row, id(k - 1, c), ih2);
        trip.emplace_back(row, id(k + 1, c), ih2);
        trip.emplace_back(row, id(k, c), -2 * ih2 - double(m) * m);
        for (int d = 0; d < nc; ++d)
          if (C[c * nc + d] != 0.0) trip.emplace_back(row, id(k, d), r2 * C[c * nc + d]);
        for (int q = 0; q < nmult; ++q)
          trip.emplace_back(row, nbase + nslope + q, -r2 * prob.deflate[mult_ids[q]].zstar[c][k] * mscale[q]);
        b[row] = r2 * rhs.comp[c][k];
      }
    }
  }
  for (int q = 0; q < ncons; ++q) {
    const auto& d = prob.deflate[cons_ids[q]];
    double mx = 0.0;
    for (int c = 0; c < nc; ++c)
      for (int k = 0; k < K; ++k) mx = std::max(mx, std::abs(grid.weight(k) * grid.r(k) * grid.r(k) * d.dz[c][k]));
    const double s = mx > 0 ? 1.0 / mx : 1.0;
    for (int k = 0; k < K; ++k)
      for (int c = 0; c < nc; ++c) {
        const double v = s * grid.weight(k) * grid.r(k) * grid.r(k) * d.dz[c][k];
        if (v != 0.0) trip.emplace_back(nbase + q, id(k, c), v);
      }
  }
  Eigen::SparseMatrix<double> A(nunk, nunk);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SingularSystemError("bordered mode system is singular");
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SingularSystemError("bordered mode solve failed");
  const double res = (A * x - b).norm();
  const double scl = b.norm() + (A * x).norm();
  if (scl > 0 && res > 1e-8 * scl) throw SingularSystemError("bordered mode system is numerically singular");

  ModeSolution out;
  out.phi = ModeField{m, rhs.parity, std::vector<Eigen::VectorXd>(nc, Eigen::VectorXd(K))};
  for (int k = 0; k < K; ++k)
    for (int c = 0; c < nc; ++c) out.phi.comp[c][k] = x[id(k, c)];
  for (int c = 0; c < nslope; ++c) out.slopes.push_back(x[nbase + c]);
  out.multipliers.assign(prob.deflate.size(), 0.0);
  for (int q = 0; q < nmult; ++q) out.multipliers[mult_ids[q]] = x[nbase + nslope + q] * mscale[q];
  return out;
}

ModeField apply_mode_operator(const ModeProblem& prob, const RadialGrid& grid, const ModeField& phi) {
  const int nc = prob.ncomp, K = grid.size();
  const double h = grid.h(), m2 = double(prob.mode) * prob.mode;
  ModeField out{phi.mode, phi.parity, std::vector<Eigen::VectorXd>(nc, Eigen::VectorXd::Zero(K))};
  std::vector<double> C(nc * nc);
  for (int k = 0; k < K; ++k) {
    const double r2 = grid.r(k) * grid.r(k);
    prob.coupling(k, C.data());
    for (int c = 0; c < nc; ++c) {
      const auto& v = phi.comp[c];
      double tt;
      if (k == 0)
        tt = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / (h * h);
      else if (k + 1 == K)
        tt = (2 * v[K - 1] - 5 * v[K - 2] + 4 * v[K - 3] - v[K - 4]) / (h * h);
      else
        tt = (v[k - 1] - 2 * v[k] + v[k + 1]) / (h * h);
      double acc = (tt - m2 * v[k]) / r2;
      for (int d = 0; d < nc; ++d) acc += C[c * nc + d] * phi.comp[d][k];
      out.comp[c][k] = acc;
    }
  }
  return out;
}

std::vector<KernelTag> kernels_of_mode(const TodaParams& p, int m, Parity parity) {
  std::vector<KernelTag> out;
  for (int i = 0; i < kNumKernels; ++i) {
    const KernelTag t = kernel_tag(i);
    if (kernel_mode(t, p.mu1(), p.mu2()) != m) continue;
    if (m > 0 && kernel_is_sine(t) != (parity == Parity::Sin)) continue;
    if (m == 0 && parity == Parity::Sin) continue;
    out.push_back(t);
  }
  return out;
}

namespace {

struct GroundWeights {
  std::vector<double> w1, w2;
};

ModeProblem linearized_problem(const TodaParams& p, int m, const std::vector<KernelTag>& deflate,
                               const RadialGrid& grid, bool borders) {
  const auto L = make_lambdas<long double>(p);
  const GroundState<long double> g(p);
  const int K = grid.size();
  auto w = std::make_shared<GroundWeights>();
  w->w1.resize(K);
  w->w2.resize(K);
  for (int k = 0; k < K; ++k) {
    w->w1[k] = double(g.w1(grid.r(k)));
    w->w2[k] = double(g.w2(grid.r(k)));
  }
  ModeProblem prob;
  prob.ncomp = 2;
  prob.mode = m;
  prob.borders = borders;
  prob.coupling = [w](int k, double* C) {
    C[0] = 2 * w->w1[k];
    C[1] = -w->w1[k];
    C[2] = -3 * w->w2[k];
    C[3] = 2 * w->w2[k];
  };
  for (KernelTag t : deflate) {
    DeflationVector d;
    d.dz.assign(2, Eigen::VectorXd(K));
    d.zstar.assign(2, Eigen::VectorXd(K));
    const Shape s = kernel_shape(t);
    for (int k = 0; k < K; ++k) {
      const auto rk = radial_kernel(L, g, s, grid.r(k));
      d.dz[0][k] = rk.d1;
      d.dz[1][k] = rk.d2;
      d.zstar[0][k] = rk.s1;
      d.zstar[1][k] = rk.s2;
    }
    d.multiplier = m > 0;
    prob.deflate.push_back(std::move(d));
  }
  return prob;
}

}  // namespace

ModeSolution solve_linearized_mode(const TodaParams& p, int m, Parity parity, const ModeField& rhs,
                                   const std::vector<KernelTag>& deflate, const RadialGrid& grid, bool borders) {
  for (KernelTag t : deflate)
    if (kernel_mode(t, p.mu1(), p.mu2()) != m) throw ConfigError("deflation kernel " + kernel_name(t) + " has another mode");
  ModeField r = rhs;
  r.mode = m;
  r.parity = parity;
  return solve_mode_problem(linearized_problem(p, m, deflate, grid, borders), grid, r);
}

LinearSolve2D solve_linearized(const TodaParams& p, const PolarGrid& g, const Field2D& rhs, Exec exec) {
  struct Job {
    int m;
    Parity par;
  };
  std::vector<Job> jobs;
  for (int m = 0; m <= g.max_mode(); ++m) {
    jobs.push_back({m, Parity::Cos});
    if (m > 0) jobs.push_back({m, Parity::Sin});
  }
  std::vector<ModeSolution> sols(jobs.size());
  std::vector<std::vector<KernelTag>> tags(jobs.size());
  std::vector<std::string> errs(jobs.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (int j = 0; j < int(jobs.size()); ++j) {
    try {
      const ModeField mf = extract_mode(g, rhs, jobs[j].m, jobs[j].par);
      tags[j] = kernels_of_mode(p, jobs[j].m, jobs[j].par);
      sols[j] = solve_linearized_mode(p, jobs[j].m, jobs[j].par, mf, tags[j], g.radial);
    } catch (const std::exception& e) {
      errs[j] = e.what();
    }
  }
  for (const auto& e : errs)
    if (!e.empty()) throw SingularSystemError(e);
  LinearSolve2D out{Field2D::zeros(g), {}};
  for (size_t j = 0; j < jobs.size(); ++j) {
    add_mode(g, sols[j].phi, out.phi);
    for (size_t q = 0; q < tags[j].size(); ++q) {
      const int pi = perturb_index(tags[j][q]);
      if (pi >= 0) out.multipliers[pi] = sols[j].multipliers[q];
    }
  }
  return out;
}

}  // namespace g2toda
