#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "g2toda/corrections.hpp"
#include "g2toda/numerics.hpp"
#include "g2toda/params.hpp"

namespace g2toda {

// Utilde_b + eps (Psi0 + sum Psi_i a_i) + eps^2 psi
struct ApproxSolution {
  TodaParams params;
  PerturbVector a{};
  CorrectionBundle bundle;
  VortexConfig config;
  PolarGrid grid;
  bool include_psi = true;
  double toda_defect = 0.0;  // polynomial-identity residual of the exact family at b
  Field2D Ub;                // exact Toda fields at (lambda, a)
  Field2D wb;                // r^{2N1} e^{2U1-U2}, r^{2N2} e^{2U2-3U1} at Ub
  Eigen::MatrixXd mixed_b;   // r^{2(N1+N2)} e^{U2-U1} at Ub
  Field2D corr;              // V - Ub
  Field2D V;
};

// polar grid with 2 M + 1 angles, M = 4 (mu1 + mu2) unless modes > 0
PolarGrid default_polar_grid(const TodaParams& p, int modes = 0, double r_max = 1e3, int nodes = 2401);

ApproxSolution build_approximation(const TodaParams& p, const PerturbVector& a, const CorrectionBundle& bundle,
                                   const VortexConfig& cfg, const PolarGrid& g, bool include_psi = true);

// Laplacian of a field resolved by the grid's modes, with the solver's second-order stencil
Field2D discrete_laplacian(const PolarGrid& g, const Field2D& f);

struct ResidualReport {
  Field2D R;  // residual of both equations of the scaled system at V + eps^2 v
  Field2D E;  // -R / eps^2
  Eigen::MatrixXi mask;  // 1 where the node takes part in norms
  int excluded = 0;      // nodes inside vortex disks
  double max_abs = 0.0;  // max |R|
  WeightedNormReport E_norms;
};

// throws ResolutionError when a vortex disk swallows a whole radial circle of nodes
ResidualReport residual_scaled(const ApproxSolution& sol, const Field2D* v = nullptr, double alpha = 0.5);

// int E Z*_i over the plane for the twelve c kernels
PerturbVector project_error(const ApproxSolution& sol, const ResidualReport& res);

struct ProjectedSolution {
  Field2D v;
  PerturbVector m{};
  int iterations = 0;
  double update = 0.0;
  WeightedNormReport v_norms;
  double orthogonality = 0.0;  // max |<Delta Z_i, v>| / (||Delta Z_i|| ||v||)
  std::vector<double> history;
};

ProjectedSolution solve_projected(const ApproxSolution& sol, int max_iter = 60, double tol = 1e-9,
                                  double alpha = 0.5);

// G2 = [[2,-1],[-3,2]]
std::pair<double, double> apply_G2(double t1, double t2);

struct PhysicalSample {
  cplx z;
  double u1, u2;
};

// u_1 = sum ln|z - p_j|^2 + U_1(eps z) + (2 N1 + 2) ln eps, u_2 likewise
std::vector<PhysicalSample> back_transform(const ApproxSolution& sol, const ProjectedSolution* proj,
                                           const std::vector<cplx>& z);

struct DecayFit {
  double alpha1 = 0.0, alpha2 = 0.0;
  bool monotone = false;
};

// least-squares slope of angular means against ln r, divided by -2
DecayFit decay_exponents(const std::vector<double>& radii, const std::vector<double>& u1_mean,
                         const std::vector<double>& u2_mean);
DecayFit decay_exponents(const ApproxSolution& sol, const ProjectedSolution* proj, double R1, double R2, int n = 24);

// pi * T-matrix for symmetric parameters, finite-difference Jacobian of project_error otherwise
Eigen::MatrixXd reduced_matrix(const TodaParams& p, const VortexConfig& cfg, const CorrectionBundle& bundle,
                               const PolarGrid& g);

struct AssemblyReport {
  TodaParams params;
  VortexConfig config;
  Regime regime = Regime::I;
  bool radial_shortcut = false;
  std::vector<std::string> notes;
  PerturbVector a{};
  double a_norm = 0.0;
  int reduced_iterations = 0;
  PerturbVector projection_at_zero{}, projection_at_a{};
  double residual_norm = 0.0;  // ||E||_** at the solved a
  double residual_max = 0.0;
  int excluded = 0;
  bool projected_converged = false;
  std::string projected_error;
  double v_norm_star = 0.0;
  int v_iterations = 0;
  DecayFit decay;
};

struct AssemblyOptions {
  int modes = 0;
  double r_max = 1e3;
  int nodes = 2401;
  double xi1 = 0.0, xi2 = 0.0;
  double reduced_tol = 1e-10;
  bool include_psi = true;
  bool run_projected = true;
};

// classify, corrections, reduced solve, assembly, projected solve and decay fit
AssemblyReport run_assembly(const TodaParams& p, const VortexConfig& cfg, const AssemblyOptions& opt = {},
                            ApproxSolution* out = nullptr);

}  // namespace g2toda
