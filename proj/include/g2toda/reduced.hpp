#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "g2toda/numerics.hpp"
#include "g2toda/params.hpp"

namespace g2toda {

// T1..T8 at index 0..7
using TEntries = std::array<double, 8>;

struct TBreakdown {
  TEntries T{};
  TEntries J{};
  TEntries dual{};  // int q psi r dr through the phi duality
};

// quadrature of J_k plus the duality integral, symmetric parameters with N1 = N2 = N
TBreakdown T_entries(int N, Exec exec = Exec::Parallel);

// the same entries built from the sine kernels
TEntries T_entries_sine(int N);

struct ClosedForms {
  double T3, T4, T7, T8;
  double combo;              // T1 T6 - T2 T5
  double T8_expanded;        // T8 evaluated from the expanded polynomial
  std::string T3_poly_value;  // exact integer value of the T3 polynomial
};

ClosedForms closed_forms(int N);

// exact integer value of the T3 polynomial at N, in decimal
std::string t3_polynomial(int N);

// 12 x 12 matrix in PerturbVector ordering
Eigen::MatrixXd assemble_T(const TEntries& T);

struct DetReport {
  double dense;
  double block_exp2;  // (T1T6-T2T5)^2 T3^2 T4^2 T7^2 T8^2
  double block_exp3;  // the same with T3^3
  double rel_exp2;
  double rel_exp3;
};

DetReport det_reduced(const TEntries& T);

struct QIntegrals {
  // index 0: j = 1 (lambda4 kernel), index 1: j = 2 (lambda5 kernel)
  std::array<double, 2> A, B, C, D, E, F, G, H;
  // int |integrand| for each entry, same layout, for judging cancellation
  std::array<double, 2> A_abs, B_abs, C_abs, D_abs, E_abs, F_abs, G_abs, H_abs;
};

QIntegrals Q_integrals(const TodaParams& p, Exec exec = Exec::Parallel);

// Q1 (xi1 coefficients) and Q2 (xi2 coefficients)
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> assemble_Q(const QIntegrals& q);

struct GammaTable {
  std::array<double, 6> gamma;
};

// throws DomainError when a csc argument is within 1e-3 of a multiple of pi and no limit applies
GammaTable gamma_constants(int mu1, int mu2);

struct AsymptoticRow {
  double lambda_tilde;
  std::array<double, 6> ratio;      // lambda^pow * integral / gamma
  std::array<double, 6> deviation;  // |ratio - 1|
};

struct AsymptoticReport {
  int mu1, mu2;
  GammaTable gamma;
  std::vector<AsymptoticRow> rows;
  bool monotone = false;
  bool within_10pct_at_last = false;
};

AsymptoticReport asymptotic_check(int mu1, int mu2, const std::vector<double>& lambda_tilde);

struct ReducedSolve {
  PerturbVector a{};
  int iterations = 0;
  double residual = 0.0;
  double initial_residual = 0.0;
};

// chord Newton a <- a - M^{-1} proj(a), halving the step when the residual grows
ReducedSolve solve_reduced_a(const Eigen::MatrixXd& M, const std::function<PerturbVector(const PerturbVector&)>& proj,
                             double tol, int max_iter = 20);

}  // namespace g2toda
