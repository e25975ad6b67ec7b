#include "g2toda/toda.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <numbers>

#include "g2toda/errors.hpp"
#include "g2toda/fd.hpp"
#include "g2toda/precision.hpp"

namespace g2toda {

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, cplx(0.0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == cplx(0.0)) continue;
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

Poly poly_deriv(const Poly& a) {
  if (a.size() <= 1) return {cplx(0.0)};
  Poly d(a.size() - 1);
  for (size_t k = 1; k < a.size(); ++k) d[k - 1] = double(k) * a[k];
  return d;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  Poly c(std::max(a.size(), b.size()), cplx(0.0));
  for (size_t k = 0; k < a.size(); ++k) c[k] += a[k];
  for (size_t k = 0; k < b.size(); ++k) c[k] -= b[k];
  return c;
}

std::array<int, 7> poly_degrees(int m1, int m2) {
  return {0, m1, m1 + m2, 2 * m1 + m2, 3 * m1 + m2, 3 * m1 + 2 * m2, 4 * m1 + 2 * m2};
}

HoloPolySet monomial_set(int mu1, int mu2) {
  HoloPolySet s;
  s.degree = poly_degrees(mu1, mu2);
  for (int i = 0; i < 7; ++i) {
    s.P[i].assign(s.degree[i] + 1, cplx(0.0));
    s.P[i][s.degree[i]] = 1.0;
  }
  return s;
}

namespace {

// coefficient (i, j) multiplies z^{s_j} in P_i
const std::array<std::pair<int, int>, 6> kFree = {{{4, 3}, {5, 2}, {5, 3}, {5, 4}, {6, 1}, {6, 2}}};

std::vector<std::pair<int, int>> dependent_keys() {
  std::vector<std::pair<int, int>> keys;
  for (int i = 1; i < 7; ++i)
    for (int j = 0; j < i; ++j)
      if (std::find(kFree.begin(), kFree.end(), std::make_pair(i, j)) == kFree.end()) keys.push_back({i, j});
  return keys;
}

cplx horner(const Poly& c, cplx z) {
  cplx acc(0.0);
  for (int k = int(c.size()) - 1; k >= 0; --k) acc = acc * z + c[k];
  return acc;
}

}  // namespace

TodaFamily::TodaFamily(const TodaParams& p, const PerturbVector& a, const FamilyOptions& opt)
    : params_(p), a_(a) {
  p.validate();
  lam_ = scale_constants(p).lambda;
  set_ = monomial_set(p.mu1(), p.mu2());
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kFree[k];
    set_.P[i][set_.degree[j]] = -0.5 * cplx(a[2 * k], a[2 * k + 1]);
  }

  const auto& s = set_.degree;
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double rc = std::exp((std::log(lam_[i]) - std::log(lam_[i + 1])) / (2.0 * (s[i + 1] - s[i])));
    lo = std::min(lo, rc);
    hi = std::max(hi, rc);
  }
  lo /= 3.0;
  hi *= 3.0;
  const int nr = 14, nt = 4 * s[6] + 13;
  for (int k = 0; k < nr; ++k) {
    const double r = lo * std::pow(hi / lo, double(k) / (nr - 1));
    for (int j = 0; j < nt; ++j) samples_.push_back(std::polar(r, 2.0 * std::numbers::pi * (j + 0.5) / nt));
  }

  rebuild();
  const bool trivial = std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; });
  if (!trivial) solve(opt);
  const auto res = residual_vector();
  residual_ = 0.0;
  for (double v : res) residual_ = std::max(residual_, std::abs(v));
}

void TodaFamily::rebuild() {
  Q_.clear();
  const int N1 = params_.N1;
  for (int i = 0; i < 7; ++i) {
    for (int j = i + 1; j < 7; ++j) {
      Poly wr = poly_sub(poly_mul(set_.P[i], poly_deriv(set_.P[j])), poly_mul(set_.P[j], poly_deriv(set_.P[i])));
      QTerm q{i, j, lam_[i] * lam_[j], Poly(wr.begin() + std::min<size_t>(N1, wr.size()), wr.end())};
      if (q.coef.empty()) q.coef.push_back(0.0);
      Q_.push_back(std::move(q));
    }
  }
}

std::vector<double> TodaFamily::residual_vector() const {
  struct V {
    double w;
    Poly c;
  };
  std::vector<V> vs;
  std::vector<Poly> dQ;
  for (const auto& q : Q_) dQ.push_back(poly_deriv(q.coef));
  for (size_t k = 0; k < Q_.size(); ++k)
    for (size_t l = k + 1; l < Q_.size(); ++l)
      vs.push_back({Q_[k].weight * Q_[l].weight,
                    poly_sub(poly_mul(Q_[k].coef, dQ[l]), poly_mul(Q_[l].coef, dQ[k]))});
  std::vector<double> out(samples_.size());
  const int N2 = params_.N2;
#pragma omp parallel for schedule(static)
  for (size_t n = 0; n < samples_.size(); ++n) {
    const cplx z = samples_[n];
    double D2 = 0.0;
    for (const auto& v : vs) D2 += v.w * std::norm(horner(v.c, z));
    const auto [W, F] = WF<double>(z.real(), z.imag());
    const double rhs = std::pow(std::norm(z), N2) * W * W * W / 128.0;
    out[n] = D2 / rhs - 1.0;
  }
  return out;
}

double TodaFamily::identity_residual_at(cplx z) const {
  auto save = samples_;
  auto* self = const_cast<TodaFamily*>(this);
  self->samples_ = {z};
  const double v = residual_vector()[0];
  self->samples_ = std::move(save);
  return v;
}

void TodaFamily::solve(const FamilyOptions& opt) {
  const auto keys = dependent_keys();
  const int n = 2 * int(keys.size());
  const auto& s = set_.degree;
  double rmean = 0.0;
  for (const auto& z : samples_) rmean += std::log(std::abs(z));
  rmean = std::exp(rmean / samples_.size());

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n), scale(n);
  for (int k = 0; k < n; ++k) {
    const auto [i, j] = keys[k / 2];
    scale[k] = std::pow(rmean, s[i] - s[j]);
  }
  auto apply = [&](const Eigen::VectorXd& xv) {
    for (int k = 0; k < n / 2; ++k) {
      const auto [i, j] = keys[k];
      set_.P[i][s[j]] = cplx(xv[2 * k], xv[2 * k + 1]);
    }
    rebuild();
  };
  auto resid = [&](const Eigen::VectorXd& xv) {
    apply(xv);
    const auto r = residual_vector();
    return Eigen::Map<const Eigen::VectorXd>(r.data(), r.size()).eval();
  };
  auto jacobian = [&](const Eigen::VectorXd& xv) {
    Eigen::MatrixXd J(samples_.size(), n);
    for (int k = 0; k < n; ++k) {
      const double h = 1e-6 * scale[k];
      Eigen::VectorXd xp = xv, xm = xv;
      xp[k] += h;
      xm[k] -= h;
      J.col(k) = (resid(xp) - resid(xm)) / (2 * h) * scale[k];
    }
    return J;
  };

  Eigen::VectorXd r = resid(x);
  double norm = r.lpNorm<Eigen::Infinity>();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> qr;
  bool fresh = false;
  auto refactor = [&]() {
    qr.setThreshold(1e-10);
    qr.compute(jacobian(x));
    fresh = true;
  };
  refactor();
  iterations_ = 0;
  while (norm > opt.tol && iterations_ < opt.max_iter) {
    ++iterations_;
    const Eigen::VectorXd dx = -(qr.solve(r).array() * scale.array()).matrix();
    const Eigen::VectorXd xn = x + dx;
    const Eigen::VectorXd rn = resid(xn);
    const double nn = rn.lpNorm<Eigen::Infinity>();
    if (nn < norm) {
      const bool slow = nn > 0.25 * norm;
      x = xn;
      r = rn;
      norm = nn;
      fresh = false;
      if (slow && norm > opt.tol) refactor();
    } else if (!fresh) {
      refactor();
    } else {
      break;
    }
  }
  apply(x);
  if (norm > 1e3 * opt.tol && norm > 1e-10)
    throw NoConvergenceError("Toda family solve stalled at residual " + std::to_string(norm));
}

std::pair<double, double> toda_fields(const TodaParams& p, const PerturbVector& a, double x, double y) {
  const TodaFamily fam(p, a);
  const auto [U1, U2] = fam.fields<double>(x, y);
  const auto [W, F] = fam.WF<double>(x, y);
  if (!(F > 0.0) || !(W > 0.0)) throw DomainError("nonpositive W or F at sample point");
  return {U1, U2};
}

TodaResidual toda_residual(const TodaFamily& fam, const std::vector<double>& radii, int n_theta) {
  const auto& p = fam.params();
  TodaResidual out;
  const f128 h = f128(2e-3);
  for (double rd : radii) {
    for (int j = 0; j < n_theta; ++j) {
      const f128 t0 = log(f128(rd));
      const f128 th0 = f128(2) * boost::math::constants::pi<f128>() * f128(j + 0.25) / f128(n_theta);
      auto comp = [&](int c, f128 t, f128 th) {
        const f128 r = exp(t);
        const auto U = fam.fields<f128>(r * cos(th), r * sin(th));
        return c == 0 ? U.first : U.second;
      };
      const f128 r = exp(t0);
      const auto U = fam.fields<f128>(r * cos(th0), r * sin(th0));
      const f128 w1 = ipow(r, 2 * p.N1) * exp(2 * U.first - U.second);
      const f128 w2 = ipow(r, 2 * p.N2) * exp(2 * U.second - 3 * U.first);
      for (int c = 0; c < 2; ++c) {
        const auto dtt = second_derivative([&](f128 t) { return comp(c, t, th0); }, t0, h);
        const auto dth = second_derivative([&](f128 th) { return comp(c, t0, th); }, th0, h);
        const f128 lap = (dtt.first + dth.first) / (r * r);
        const f128 w = c == 0 ? w1 : w2;
        const double res = double(abs(lap + w));
        const double scl = double(abs(lap) + abs(w));
        const double rich = double((dtt.second + dth.second) / (r * r)) / scl;
        out.max_abs = std::max(out.max_abs, res);
        if (res / scl > out.max_rel) {
          out.max_rel = res / scl;
          out.worst_r = rd;
        }
        out.richardson = std::max(out.richardson, rich);
      }
    }
  }
  if (out.richardson > 1e-4) throw ResolutionError("finite-difference Laplacian not converged");
  return out;
}

TodaResidual toda_residual(const TodaParams& p, const PerturbVector& a, const std::vector<double>& radii, int n_theta) {
  return toda_residual(TodaFamily(p, a), radii, n_theta);
}

}  // namespace g2toda
