#include "g2toda/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "g2toda/errors.hpp"
#include "g2toda/fd.hpp"

namespace g2toda {

std::pair<double, double> kernel_eval(const TodaParams& p, KernelTag tag, double r, double theta,
                                      const KernelOptions& opt) {
  const auto L = make_lambdas<long double>(p);
  const auto [z1, z2] = kernel_eval_t<long double>(L, tag, r, theta, opt);
  return {double(z1), double(z2)};
}

RadialKernel radial_kernel(const Lambdas<long double>& L, const GroundState<long double>& g, Shape shape, double r,
                           const KernelOptions& opt) {
  const long double R = r;
  const auto [z1, z2] = kernel_radial<long double>(L, shape, R, opt);
  const long double w1 = g.w1(R), w2 = g.w2(R);
  RadialKernel k;
  k.z1 = double(z1);
  k.z2 = double(z2);
  k.s1 = double(2 * z1 - z2);
  k.s2 = double((2 * z2) / 3 - z1);
  k.d1 = double(-w1 * (2 * z1 - z2));
  k.d2 = double(-w2 * (2 * z2 - 3 * z1));
  if (!std::isfinite(k.z1) || !std::isfinite(k.z2) || !std::isfinite(k.d1) || !std::isfinite(k.d2))
    k = RadialKernel{0, 0, 0, 0, 0, 0};
  return k;
}

std::vector<double> geometric_radii(double a, double b, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = a * std::pow(b / a, n == 1 ? 0.0 : double(i) / (n - 1));
  return r;
}

KernelResidual verify_radial_pair(const TodaParams& p, int mode, const RadialPair128& f, bool adjoint_system,
                                  const std::vector<double>& radii) {
  const GroundState<f128> g(p);
  const f128 h = f128(2e-3);
  const f128 m2 = f128(mode) * mode;
  KernelResidual out;
  for (double rd : radii) {
    const f128 t0 = log(f128(rd));
    const f128 r = exp(t0);
    const auto F = f(r);
    const f128 w1 = g.w1(r), w2 = g.w2(r);
    const f128 fv[2] = {F.first, F.second};
    for (int c = 0; c < 2; ++c) {
      const auto dtt = second_derivative(
          [&](f128 t) {
            const auto v = f(exp(t));
            return c == 0 ? v.first : v.second;
          },
          t0, h);
      const f128 lap = (dtt.first - m2 * fv[c]) / (r * r);
      f128 ta, tb;
      if (!adjoint_system) {
        ta = c == 0 ? 2 * w1 * fv[0] : 2 * w2 * fv[1];
        tb = c == 0 ? -w1 * fv[1] : -3 * w2 * fv[0];
      } else {
        ta = c == 0 ? 2 * w1 * fv[0] : 2 * w2 * fv[1];
        tb = c == 0 ? -3 * w2 * fv[1] : -w1 * fv[0];
      }
      const f128 res = abs(lap + ta + tb);
      f128 scl = abs(dtt.first) / (r * r);
      for (f128 v : {f128(m2 * abs(fv[c]) / (r * r)), f128(abs(ta)), f128(abs(tb))})
        if (v > scl) scl = v;
      if (scl == 0) continue;
      const double rel = double(res / scl);
      const double rich = double(dtt.second / (r * r) / scl);
      out.max_abs = std::max(out.max_abs, double(res));
      if (rel > out.max_rel) {
        out.max_rel = rel;
        out.worst_r = rd;
      }
      out.richardson = std::max(out.richardson, rich);
    }
  }
  if (out.richardson > 1e-4) throw ResolutionError("finite-difference radial Laplacian not converged");
  return out;
}

static RadialPair128 kernel_pair(const TodaParams& p, KernelTag tag, bool star, const KernelOptions& opt) {
  const auto L = make_lambdas<f128>(p);
  const Shape s = kernel_shape(tag);
  return [L, s, star, opt](f128 r) {
    auto z = kernel_radial<f128>(L, s, r, opt);
    if (star) return std::pair<f128, f128>{2 * z.first - z.second, 2 * z.second / 3 - z.first};
    return z;
  };
}

KernelResidual verify_kernel(const TodaParams& p, KernelTag tag, const std::vector<double>& radii,
                             const KernelOptions& opt) {
  return verify_radial_pair(p, kernel_mode(tag, p.mu1(), p.mu2()), kernel_pair(p, tag, false, opt), false, radii);
}

KernelResidual verify_adjoint_kernel(const TodaParams& p, KernelTag tag, const std::vector<double>& radii,
                                     const KernelOptions& opt) {
  return verify_radial_pair(p, kernel_mode(tag, p.mu1(), p.mu2()), kernel_pair(p, tag, true, opt), true, radii);
}

double angular_overlap(int m, bool sin_a, int mp, bool sin_b) {
  const int n = 4 * (m + mp) + 16;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double th = 2.0 * std::numbers::pi * j / n;
    const double a = sin_a ? std::sin(m * th) : std::cos(m * th);
    const double b = sin_b ? std::sin(mp * th) : std::cos(mp * th);
    acc += a * b;
  }
  return acc * 2.0 * std::numbers::pi / n;
}

namespace {

GramResult gram(const TodaParams& p, int first, bool star, Exec exec) {
  const int n = kNumKernels - first;
  const auto L = make_lambdas<long double>(p);
  const GroundState<long double> g(p);
  GramResult out;
  out.matrix = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::string> fail(n * n);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (int e = 0; e < n * n; ++e) {
    const int i = e / n, j = e % n;
    const KernelTag ti = kernel_tag(first + i), tj = kernel_tag(first + j);
    const int mi = kernel_mode(ti, p.mu1(), p.mu2()), mj = kernel_mode(tj, p.mu1(), p.mu2());
    const double ang = angular_overlap(mi, kernel_is_sine(ti), mj, kernel_is_sine(tj));
    if (std::abs(ang) < 1e-12) {
      out.matrix(i, j) = ang;
      continue;
    }
    const Shape si = kernel_shape(ti), sj = kernel_shape(tj);
    auto integrand = [&](double r) {
      const auto a = radial_kernel(L, g, si, r);
      const auto b = radial_kernel(L, g, sj, r);
      return star ? r * (a.s1 * b.s1 + a.s2 * b.s2) : r * (a.d1 * b.z1 + a.d2 * b.z2);
    };
    try {
      out.matrix(i, j) = ang * integrate_halfline(integrand, 1e-10).value;
    } catch (const QuadratureError& ex) {
      out.matrix(i, j) = std::nan("");
      fail[e] = kernel_name(ti) + "," + kernel_name(tj) + ": " + ex.what();
    }
  }
  for (const auto& f : fail)
    if (!f.empty()) out.failures.push_back(f);
  if (!out.failures.empty()) {
    out.det = out.log10_abs_det = out.cond = std::nan("");
    return out;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(out.matrix);
  const Eigen::MatrixXd U = lu.matrixLU().triangularView<Eigen::Upper>();
  out.log10_abs_det = 0.0;
  for (int k = 0; k < n; ++k) out.log10_abs_det += std::log10(std::abs(U(k, k)));
  out.det = lu.determinant();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.matrix);
  const auto& sv = svd.singularValues();
  out.cond = sv(0) / sv(n - 1);
  return out;
}

}  // namespace

GramResult gram_delta(const TodaParams& p, Exec exec) { return gram(p, 0, false, exec); }
GramResult gram_star(const TodaParams& p, Exec exec) { return gram(p, 2, true, exec); }

}  // namespace g2toda
