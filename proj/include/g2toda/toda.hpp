#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "g2toda/params.hpp"
#include "g2toda/profiles.hpp"

namespace g2toda {

using cplx = std::complex<double>;
using Poly = std::vector<cplx>;  // coefficient of z^k at index k

Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_deriv(const Poly& a);
Poly poly_sub(const Poly& a, const Poly& b);

// P_0 .. P_6 with P_0 = 1 and P_i monic of degree s_i
struct HoloPolySet {
  std::array<int, 7> degree;
  std::array<Poly, 7> P;
};

std::array<int, 7> poly_degrees(int mu1, int mu2);
HoloPolySet monomial_set(int mu1, int mu2);

// Horner evaluation of a complex-coefficient polynomial at x + iy in precision T
template <class T>
void poly_eval(const Poly& c, T x, T y, T& re, T& im, int from = 0) {
  re = T(0);
  im = T(0);
  for (int k = int(c.size()) - 1; k >= from; --k) {
    const T nr = re * x - im * y + T(c[k].real());
    const T ni = re * y + im * x + T(c[k].imag());
    re = nr;
    im = ni;
  }
}

struct FamilyOptions {
  int max_iter = 30;
  double tol = 1e-13;
};

class TodaFamily {
 public:
  TodaFamily(const TodaParams& p, const PerturbVector& a, const FamilyOptions& opt = {});

  const TodaParams& params() const { return params_; }
  const PerturbVector& a() const { return a_; }
  const HoloPolySet& polys() const { return set_; }
  double identity_residual() const { return residual_; }
  int iterations() const { return iterations_; }

  // W = lambda0 + sum lambda_i |P_i|^2 and F = sum lambda_i lambda_j |Q_ij|^2
  template <class T>
  std::pair<T, T> WF(T x, T y) const {
    T W(0), F(0), re, im;
    for (int i = 0; i < 7; ++i) {
      poly_eval(set_.P[i], x, y, re, im);
      W += T(lam_[i]) * (re * re + im * im);
    }
    for (const auto& q : Q_) {
      poly_eval(q.coef, x, y, re, im);
      F += T(q.weight) * (re * re + im * im);
    }
    return {W, F};
  }

  // (U1, U2) = (-ln 2W, -ln 16F)
  template <class T>
  std::pair<T, T> fields(T x, T y) const {
    using std::log;
    const auto [W, F] = WF(x, y);
    return {-log(2 * W), -log(16 * F)};
  }

  // relative residual of the second Toda equation expressed as a polynomial identity
  double identity_residual_at(cplx z) const;

  struct QTerm {
    int i, j;
    double weight;
    Poly coef;
  };
  const std::vector<QTerm>& q_terms() const { return Q_; }

 private:
  void rebuild();
  std::vector<double> residual_vector() const;
  void solve(const FamilyOptions& opt);

  TodaParams params_;
  PerturbVector a_;
  std::array<double, 7> lam_;
  HoloPolySet set_;
  std::vector<QTerm> Q_;
  std::vector<cplx> samples_;
  double residual_ = 0.0;
  int iterations_ = 0;
};

// (U1, U2) of the exact solution with perturbation a
std::pair<double, double> toda_fields(const TodaParams& p, const PerturbVector& a, double x, double y);

struct TodaResidual {
  double max_abs = 0.0;
  double max_rel = 0.0;
  double richardson = 0.0;
  double worst_r = 0.0;
};

// both Toda equations checked by high-order finite differences in (ln r, theta)
TodaResidual toda_residual(const TodaFamily& fam, const std::vector<double>& radii, int n_theta);
TodaResidual toda_residual(const TodaParams& p, const PerturbVector& a, const std::vector<double>& radii, int n_theta);

}  // namespace g2toda
