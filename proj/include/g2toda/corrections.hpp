#pragma once

#include <array>
#include <complex>
#include <vector>

#include "g2toda/numerics.hpp"
#include "g2toda/params.hpp"

namespace g2toda {

using cplx = std::complex<double>;

struct VortexConfig {
  std::vector<cplx> p;
  std::vector<cplx> q;
  double eps = 0.01;
};

enum class Regime { I, II, III };

const char* regime_name(Regime r);

struct RegimeInfo {
  bool case_a = false;  // N2 sum p = N1 sum q
  bool case_b = false;
  Regime regime = Regime::I;
  cplx shift{0.0, 0.0};  // translation making both sums vanish under case (a)
};

// throws ConfigError for configurations outside cases (a) and (b)
RegimeInfo classify(const VortexConfig& cfg, double tol = 1e-12);
VortexConfig translated(const VortexConfig& cfg, cplx shift);

// prod |z - eps p_j|^2
double vortex_poly(const std::vector<cplx>& pts, double eps, cplx z);

struct VortexTaylor {
  double f, f_eps, f_epseps;
  double g, g_eps, g_epseps;
};

// exact Taylor data at eps = 0
VortexTaylor vortex_taylor(const VortexConfig& cfg, cplx z);

// samples of kernels on the polar grid
Field2D kernel_field(const TodaParams& p, KernelTag tag, const PolarGrid& g);
Field2D adjoint_field(const TodaParams& p, KernelTag tag, const PolarGrid& g);

// the ground-state coefficients at the grid radii
struct GroundSamples {
  std::vector<double> w1, w2;  // r^{2N1} e^{2U1-U2}, r^{2N2} e^{2U2-3U1}
  std::vector<double> mixed;   // r^{2(N1+N2)} e^{U2-U1}
  std::vector<double> U1, U2;
};
GroundSamples ground_samples(const TodaParams& p, const RadialGrid& g);

// max_j |<rhs, Z*_j>| / (||rhs|| ||Z*_j||) over the c kernels
double projection_defect(const TodaParams& p, const PolarGrid& g, const Field2D& rhs, int* worst = nullptr);

struct CorrectionBundle {
  Field2D Psi0;
  std::array<Field2D, 12> Psi;
  Field2D psi0;
  double xi1 = 0.0, xi2 = 0.0;
  bool Psi_zero = true;
  Regime regime = Regime::I;
};

Field2D Psi0_rhs(const TodaParams& p, const VortexConfig& cfg, const PolarGrid& g);
Field2D solve_Psi0(const TodaParams& p, const VortexConfig& cfg, const PolarGrid& g);

Field2D Psi_i_rhs(const TodaParams& p, const VortexConfig& cfg, const Field2D& Psi0, KernelTag tag, const PolarGrid& g);
// throws SolvabilityError when the right-hand side is not orthogonal to the adjoint kernels
Field2D solve_Psi_i(const TodaParams& p, const VortexConfig& cfg, const Field2D& Psi0, KernelTag tag,
                    const PolarGrid& g, double tol = 1e-8);

Field2D psi_rhs(const TodaParams& p, const VortexConfig& cfg, const Field2D& Psi0, Regime regime, const PolarGrid& g);
Field2D solve_psi(const TodaParams& p, const VortexConfig& cfg, const Field2D& Psi0, Regime regime,
                  const PolarGrid& g, double tol = 1e-8);

// cfg is expected in the frame produced by classify
CorrectionBundle build_corrections(const TodaParams& p, const VortexConfig& cfg, Regime regime, const PolarGrid& g,
                                   double xi1 = 0.0, double xi2 = 0.0);

// the symmetric scalar problem  psi'' + psi'/r + V psi = S
//   V = 8 mu^2 r^{2N}/(1+r^{2mu})^2,  S = 3 2^6 mu^4 r^{4N}/(1+r^{2mu})^4
double symmetric_weight(int N, double r);
double symmetric_source(int N, double r);

struct ScalarSolution {
  RadialGrid grid;
  Eigen::VectorXd psi;
  double slope = 0.0;
};

// Richardson-extrapolated solve normalized by <Delta phi_0, psi> = 0, phi_0 = (1-r^{2mu})/(1+r^{2mu})
ScalarSolution solve_psi_symmetric(int N, const RadialGrid& grid, bool richardson = true);
// cached solve on the default grid, interpolated
double psi_symmetric(int N, double r);

template <class T>
T q_eval_t(int N, int i, T r);
template <class T>
T phi_eval_t(int N, int i, T r);

double q_eval(int N, int i, double r);
double phi_eval(int N, int i, double r);

// polynomial numerators of phi_1..phi_6 in x = r^{2mu}; phi_i = (num/den) sum coef_k x^k / (1+x)^10
struct PhiTable {
  int num, den;
  std::vector<double> coef;
};
PhiTable phi_table(int i);

// FD check of phi_i'' + phi_i'/r + V phi_i = q_i relative to max |q_i|; a custom table replaces phi_i
double verify_phi_ode(int N, int i, const std::vector<double>& radii, const PhiTable* table = nullptr);

struct DualityCheck {
  double psi_q;     // int psi q_i r dr
  double src_phi;   // int S phi_i r dr
  double rel;
};
DualityCheck duality(int N, int i);

}  // namespace g2toda
