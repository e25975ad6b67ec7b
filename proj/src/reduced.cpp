#include "g2toda/reduced.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>

#include "g2toda/corrections.hpp"
#include "g2toda/errors.hpp"
#include "g2toda/kernels.hpp"
#include "g2toda/profiles.hpp"

namespace g2toda {

using boost::multiprecision::cpp_int;

namespace {

struct TRole {
  Shape row, col;
  int q;
};

// T1..T8: row kernel (projection), column kernel (coefficient), q index of the psi part
constexpr std::array<TRole, 8> kRoles = {{{Shape::C43, Shape::C43, 1},
                                          {Shape::C43, Shape::C54, 7},
                                          {Shape::C52, Shape::C52, 2},
                                          {Shape::C53, Shape::C53, 3},
                                          {Shape::C54, Shape::C43, 7},
                                          {Shape::C54, Shape::C54, 4},
                                          {Shape::C61, Shape::C61, 5},
                                          {Shape::C62, Shape::C62, 6}}};

double J_integral(int N, Shape row, Shape col) {
  const TodaParams p = TodaParams::symmetric(N);
  const auto L = make_lambdas<long double>(p);
  auto f = [&](double rd) {
    const long double r = rd;
    const auto a = kernel_radial<long double>(L, row, r);
    const auto b = kernel_radial<long double>(L, col, r);
    const long double E1 = 1 / (2 * rho1_inv(L, r)), E2 = 1 / (4 * rho2_inv(L, r));
    const long double A1 = 2 * a.first - a.second, B1 = 2 * b.first - b.second;
    const long double A2 = 2 * a.second - 3 * a.first, B2 = 2 * b.second - 3 * b.first;
    const long double r4 = ipow(r, 4 * N);
    const long double cross = r4 * E2 / E1 * (b.second - b.first);
    const long double v = r * (4 * r4 * ipow(E1, 4) / (E2 * E2) * A1 * B1 - cross * A1 +
                               4.0L / 3 * r4 * ipow(E2, 4) / ipow(E1, 6) * A2 * B2 - cross * A2);
    return std::isfinite(double(v)) ? double(v) : 0.0;
  };
  return integrate_halfline(f, 1e-12).value;
}

double dual_integral(int N, int q) {
  return integrate_halfline([&](double r) { return symmetric_source(N, r) * phi_eval(N, q, r) * r; }, 1e-12).value;
}

}  // namespace

TBreakdown T_entries(int N, Exec exec) {
  if (N < 1) throw DomainError("T entries need N >= 1");
  TBreakdown out;
  std::array<std::string, 8> err;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (int k = 0; k < 8; ++k) {
    try {
      out.J[k] = J_integral(N, kRoles[k].row, kRoles[k].col);
      out.dual[k] = dual_integral(N, kRoles[k].q);
      out.T[k] = out.J[k] + out.dual[k];
    } catch (const std::exception& e) {
      err[k] = e.what();
    }
  }
  for (const auto& e : err)
    if (!e.empty()) throw QuadratureError(e);
  return out;
}

TEntries T_entries_sine(int N) {
  const TBreakdown b = T_entries(N);
  const TodaParams p = TodaParams::symmetric(N);
  auto mode = [&](Shape s) { return shape_mode(s, p.mu1(), p.mu2()); };
  TEntries out{};
  for (int k = 0; k < 8; ++k) {
    const double cc = angular_overlap(mode(kRoles[k].row), false, mode(kRoles[k].col), false);
    const double ss = angular_overlap(mode(kRoles[k].row), true, mode(kRoles[k].col), true);
    out[k] = b.J[k] * (ss / cc) + b.dual[k];
  }
  return out;
}

namespace {

// coefficients, highest degree first
cpp_int horner(const std::vector<long long>& c, const cpp_int& n) {
  cpp_int acc = 0;
  for (long long v : c) acc = acc * n + v;
  return acc;
}

using IPoly = std::vector<cpp_int>;  // lowest degree first

IPoly ip_mul(const IPoly& a, const IPoly& b) {
  IPoly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

IPoly ip_affine(long long s, long long t) { return {cpp_int(t), cpp_int(s)}; }  // s n + t

// x (s P + t) in nested form: returns n * (s*P + t)
IPoly ip_nest(long long s, const IPoly& P, long long t) {
  IPoly q = P;
  for (auto& v : q) v *= s;
  q[0] += t;
  return ip_mul({0, 1}, q);
}

cpp_int ip_eval(const IPoly& p, const cpp_int& n) {
  cpp_int acc = 0;
  for (size_t k = p.size(); k-- > 0;) acc = acc * n + p[k];
  return acc;
}

cpp_int t8_factored(const cpp_int& n) {
  const cpp_int P = n * (n * (2 * n * (12 * n * (504 * n * (855 * n + 3997) + 4024843) + 51916217) + 62504971) +
                         19787638) +
                    2554776;
  return (n + 2) * (2 * n + 3) * (3 * n + 4) * (4 * n + 5) * (5 * n + 6) * P;
}

IPoly t8_expanded() {
  // mirror the nested display term by term
  IPoly P = ip_affine(855, 3997);
  P = ip_nest(504, P, 0);
  P[0] += 4024843;
  P = ip_nest(12, P, 0);
  P[0] += 51916217;
  P = ip_nest(2, P, 0);
  P[0] += 62504971;
  P = ip_nest(1, P, 0);
  P[0] += 19787638;
  P = ip_nest(1, P, 0);
  P[0] += 2554776;
  for (auto [s, t] : std::array<std::pair<int, int>, 5>{{{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}}}) P = ip_mul(P, ip_affine(s, t));
  return P;
}

cpp_int combo_poly(const cpp_int& n) {
  const cpp_int P =
      n * (n * (n * (n * (2 * n * (9 * n * (2 * n * (120 * n * (4365 * n + 37031) + 17041651) + 77384503) +
                                   1031119715) +
                      2064834729) +
                 1398543708) +
            617719460) +
           161120544) +
      18780480;
  return (n + 2) * (n + 2) * (2 * n + 3) * (2 * n + 3) * P;
}

double to_double(const cpp_int& v) { return v.convert_to<double>(); }

const std::vector<long long> kT3 = {229219200,      2741981760,      14845935288,     48087228720,
                                    103607697806,   155921208688,    167142190971,    127469747650,
                                    67655345084,    23742751992,     4943660256,      461099520};
const std::vector<long long> kT4 = {73483200,       879636240,       4780746072,      15595933680,
                                    33964635664,    51871736672,     56687585199,     44305756250,
                                    24240925096,    8824079448,      1917285264,      187548480};
const std::vector<long long> kT7 = {604195200,      7224396480,      38670644088,     122313524400,
                                    253958797454,   363332551792,    365322970803,    257996555026,
                                    125308378700,   39819491064,     7439155488,      617621760};

}  // namespace

std::string t3_polynomial(int N) { return horner(kT3, cpp_int(N)).str(); }

ClosedForms closed_forms(int N) {
  if (N < 1) throw DomainError("closed forms need N >= 1");
  const double pi = std::numbers::pi;
  const double n = N;
  const double cs = 1.0 / std::sin(pi / (N + 1));
  const cpp_int cn = N;
  const double pre = pi * n * cs / std::pow(n + 1, 10);
  ClosedForms c;
  c.T3 = pre / 5405400 * to_double(horner(kT3, cn));
  c.T4 = pre / 5405400 * to_double(horner(kT4, cn));
  c.T7 = pre / 70053984 * to_double(horner(kT7, cn));
  c.T8 = pre / 437837400 * to_double(t8_factored(cn));
  c.T8_expanded = pre / 437837400 * to_double(ip_eval(t8_expanded(), cn));
  c.combo = pi * pi * n * n * n * cs * cs / (6949800 * std::pow(n + 1, 12)) * to_double(combo_poly(cn));
  c.T3_poly_value = horner(kT3, cn).str();
  return c;
}

Eigen::MatrixXd assemble_T(const TEntries& T) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(12, 12);
  for (int i = 0; i < 2; ++i) {
    M(0 + i, 0 + i) = T[0];
    M(0 + i, 6 + i) = T[1];
    M(2 + i, 2 + i) = T[2];
    M(4 + i, 4 + i) = T[3];
    M(6 + i, 0 + i) = T[4];
    M(6 + i, 6 + i) = T[5];
    M(8 + i, 8 + i) = T[6];
    M(10 + i, 10 + i) = T[7];
  }
  return M;
}

DetReport det_reduced(const TEntries& T) {
  DetReport d;
  d.dense = Eigen::PartialPivLU<Eigen::MatrixXd>(assemble_T(T)).determinant();
  const double c = T[0] * T[5] - T[1] * T[4];
  const double base = c * c * T[3] * T[3] * T[6] * T[6] * T[7] * T[7];
  d.block_exp2 = base * T[2] * T[2];
  d.block_exp3 = base * T[2] * T[2] * T[2];
  d.rel_exp2 = std::abs(d.dense - d.block_exp2) / std::abs(d.dense);
  d.rel_exp3 = std::abs(d.dense - d.block_exp3) / std::abs(d.dense);
  return d;
}

namespace {

struct SignedIntegral {
  double value, l1;
};

// int_0^inf f dr on unit panels in ln r; the error is judged against int |f|
SignedIntegral signed_integral(const std::function<double(double)>& f) {
  auto g = [&](double s) {
    const double r = std::exp(s);
    return f(r) * r;
  };
  SignedIntegral out{0.0, 0.0};
  double err = 0.0;
  for (int k = -28; k < 28; ++k) {
    double e = 0.0, l1 = 0.0;
    out.value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, k, k + 1, 8, 1e-12, &e, &l1);
    err += e;
    out.l1 += l1;
  }
  if (!std::isfinite(out.value) || err > 1e-9 * out.l1) throw QuadratureError("signed radial integral did not converge");
  return out;
}

}  // namespace

QIntegrals Q_integrals(const TodaParams& p, Exec exec) {
  const auto L = make_lambdas<long double>(p);
  const GroundState<long double> g(p);
  const int m1 = p.mu1(), m2 = p.mu2();
  struct Item {
    Shape a, b;
    std::array<double, 2>* val;
    std::array<double, 2>* abs;
  };
  QIntegrals q{};
  const std::array<Item, 8> items = {{{Shape::C43, Shape::C43, &q.A, &q.A_abs},
                                      {Shape::C43, Shape::C54, &q.B, &q.B_abs},
                                      {Shape::C52, Shape::C52, &q.C, &q.C_abs},
                                      {Shape::C53, Shape::C53, &q.D, &q.D_abs},
                                      {Shape::C54, Shape::C54, &q.E, &q.E_abs},
                                      {Shape::C43, Shape::C54, &q.F, &q.F_abs},
                                      {Shape::C61, Shape::C61, &q.G, &q.G_abs},
                                      {Shape::C62, Shape::C62, &q.H, &q.H_abs}}};
  std::array<std::string, 16> err;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
  for (int e = 0; e < 16; ++e) {
    const Item& it = items[e / 2];
    const Shape sj = e % 2 == 0 ? Shape::L4 : Shape::L5;
    const double ang = angular_overlap(shape_mode(it.a, m1, m2), false, shape_mode(it.b, m1, m2), false);
    auto integrand = [&](double rd) {
      const long double r = rd;
      const auto zj = kernel_radial<long double>(L, sj, r);
      const auto za = kernel_radial<long double>(L, it.a, r);
      const auto zb = kernel_radial<long double>(L, it.b, r);
      const long double t1 = g.w1(r) * (2 * zj.first - zj.second) * (2 * za.first - za.second) * (2 * zb.first - zb.second);
      const long double t2 = g.w2(r) / 3 * (2 * zj.second - 3 * zj.first) * (2 * za.second - 3 * za.first) *
                             (2 * zb.second - 3 * zb.first);
      const double v = double(r * (t1 + t2));
      return std::isfinite(v) ? v : 0.0;
    };
    try {
      const SignedIntegral si = signed_integral(integrand);
      (*it.val)[e % 2] = ang * si.value;
      (*it.abs)[e % 2] = std::abs(ang) * si.l1;
    } catch (const std::exception& ex) {
      err[e] = ex.what();
    }
  }
  for (const auto& s : err)
    if (!s.empty()) throw QuadratureError(s);
  return q;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> assemble_Q(const QIntegrals& q) {
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> out{Eigen::MatrixXd::Zero(12, 12), Eigen::MatrixXd::Zero(12, 12)};
  for (int j = 0; j < 2; ++j) {
    Eigen::MatrixXd& M = j == 0 ? out.first : out.second;
    for (int i = 0; i < 2; ++i) {
      M(0 + i, 0 + i) = q.A[j];
      M(0 + i, 6 + i) = q.B[j];
      M(2 + i, 2 + i) = q.C[j];
      M(4 + i, 4 + i) = q.D[j];
      M(6 + i, 0 + i) = q.F[j];
      M(6 + i, 6 + i) = q.E[j];
      M(8 + i, 8 + i) = q.G[j];
      M(10 + i, 10 + i) = q.H[j];
    }
  }
  return out;
}

namespace {

double csc_checked(double arg) {
  const double pi = std::numbers::pi;
  const double k = std::round(arg / pi);
  if (std::abs(arg - k * pi) < 1e-3) throw DomainError("csc argument too close to a multiple of pi");
  return 1.0 / std::sin(arg);
}

}  // namespace

GammaTable gamma_constants(int mu1, int mu2) {
  const double pi = std::numbers::pi;
  const double a = mu1, b = mu2;
  const double s = 2 * a + b;
  const double P = (a + b) * (a + b) * s * s * (3 * a + 2 * b) * (3 * a + 2 * b);
  GammaTable g;
  g.gamma[0] = 4092 * a * (a + b) * (3 * a + b) / s * pi * pi * csc_checked(a * pi / s);
  g.gamma[1] = -44695552.0 * std::pow(a, 4) * b * b * (a + b) * (a + b) * std::pow(s, 3) * (3 * a + b) * (3 * a + b) * pi;
  // (2mu1 - mu2)(6mu1 - mu2) csc(8 mu1 pi/(2mu1+mu2)) with its removable limits
  double sing;
  if (mu2 == 2 * mu1)
    sing = (2 * a / pi) * (6 * a - b);
  else if (mu2 == 6 * mu1)
    sing = (2 * a - b) * (-8 * a / pi);
  else
    sing = (2 * a - b) * (6 * a - b) * csc_checked(8 * a * pi / s);
  g.gamma[2] = std::pow(a, 3) * b * b * std::pow(2.0, 36 - 56 * a / s) * std::pow(a + b, 4) * s * (3 * a + 2 * b) *
               std::pow(P, 1 - 8 * a / s) * (2 * a * a - 5 * a * b - 6 * b * b) * pi * pi * sing;
  g.gamma[3] = std::pow(a, 4) * std::pow(b, 5) * std::pow(2.0, 14 * a / s + 17) / ((3 * a + b) * (3 * a + b)) *
               std::pow(a + b, 6) * s * std::pow(P, -2 * (a + b) / s) * (9 * a + 7 * b) * pi * pi *
               csc_checked(2 * a * pi / s);
  g.gamma[4] = -341 * std::pow(a, 6) * std::pow(b, 6) * std::pow(2.0, 7 * a / s + 23) * std::pow(a + b, 9) *
               std::pow(3 * a + 2 * b, 3) * std::pow(P, a / s - 1) * (5 * a + 3 * b) * pi * pi * csc_checked(pi * a / s);
  g.gamma[5] = -1.0 / 3 * std::pow(a, 4) * b * b * std::pow(2.0, 7 * a / s + 15) * std::pow(a + b, 5) * s * (3 * a + b) *
               std::pow(3 * a + 2 * b, 2) * std::pow((a + b) * s * (3 * a + 2 * b), 2 * a / s - 4) * pi * pi *
               csc_checked(pi * a / s);
  return g;
}

AsymptoticReport asymptotic_check(int mu1, int mu2, const std::vector<double>& lambda_tilde) {
  AsymptoticReport rep;
  rep.mu1 = mu1;
  rep.mu2 = mu2;
  rep.gamma = gamma_constants(mu1, mu2);
  const std::array<int, 6> pw = {1, 1, 2, 4, 3, 0};
  for (double lt : lambda_tilde) {
    const QIntegrals q = Q_integrals(TodaParams::scaled(mu1 - 1, mu2 - 1, lt));
    const std::array<double, 6> v = {q.A[0], q.C[0], q.D[0], q.E[0], q.G[0], q.H[0]};
    AsymptoticRow row{lt, {}, {}};
    for (int k = 0; k < 6; ++k) {
      row.ratio[k] = std::pow(lt, pw[k]) * v[k] / rep.gamma.gamma[k];
      row.deviation[k] = std::abs(row.ratio[k] - 1);
    }
    rep.rows.push_back(row);
  }
  rep.monotone = true;
  for (size_t i = 1; i < rep.rows.size(); ++i)
    for (int k = 0; k < 6; ++k)
      if (!(rep.rows[i].deviation[k] < rep.rows[i - 1].deviation[k])) rep.monotone = false;
  rep.within_10pct_at_last = !rep.rows.empty();
  if (!rep.rows.empty())
    for (int k = 0; k < 6; ++k)
      if (!(rep.rows.back().deviation[k] <= 0.10)) rep.within_10pct_at_last = false;
  return rep;
}

ReducedSolve solve_reduced_a(const Eigen::MatrixXd& M, const std::function<PerturbVector(const PerturbVector&)>& proj,
                             double tol, int max_iter) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  auto vec = [](const PerturbVector& a) { return Eigen::Map<const Eigen::VectorXd>(a.data(), 12).eval(); };
  ReducedSolve out;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(12);
  PerturbVector av{};
  Eigen::VectorXd r = vec(proj(av));
  out.initial_residual = r.norm();
  for (int it = 0; it < max_iter; ++it) {
    if (r.norm() <= tol) {
      out.iterations = it;
      out.residual = r.norm();
      Eigen::Map<Eigen::VectorXd>(out.a.data(), 12) = a;
      return out;
    }
    Eigen::VectorXd step = -lu.solve(r);
    for (int damp = 0; damp < 8; ++damp) {
      Eigen::VectorXd trial = a + step;
      Eigen::Map<Eigen::VectorXd>(av.data(), 12) = trial;
      Eigen::VectorXd rn = vec(proj(av));
      if (rn.norm() < r.norm() || damp == 7) {
        a = trial;
        r = rn;
        break;
      }
      step *= 0.5;
    }
  }
  if (r.norm() <= tol) {
    out.iterations = max_iter;
    out.residual = r.norm();
    Eigen::Map<Eigen::VectorXd>(out.a.data(), 12) = a;
    return out;
  }
  throw NoConvergenceError("reduced Newton iteration did not converge, residual " + std::to_string(r.norm()));
}

}  // namespace g2toda
