#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "g2toda/params.hpp"

namespace g2toda {

enum class Exec { Serial, Parallel };

struct Quadrature {
  double value = 0.0;
  double error = 0.0;
};

// int_0^inf f(r) dr through r = t/(1-t); throws QuadratureError when the
// estimate exceeds max(tol |value|, 1e-10 * int |f|)
Quadrature integrate_halfline(const std::function<double(double)>& f, double tol = 1e-10, int max_depth = 18);

// int_a^b f(r) dr over panels of unit length in ln r, for integrands spread over many decades
Quadrature integrate_log(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

// uniform in t = ln r on [r_min, r_max]
class RadialGrid {
 public:
  RadialGrid(double r_min = 1e-3, double r_max = 1e3, int nodes = 2401);

  int size() const { return int(r_.size()); }
  double h() const { return h_; }
  double r(int k) const { return r_[k]; }
  double t(int k) const { return t0_ + h_ * k; }
  double r_min() const { return r_.front(); }
  double r_max() const { return r_.back(); }
  const std::vector<double>& radii() const { return r_; }
  // trapezoid weight of node k for int g dt
  double weight(int k) const { return (k == 0 || k + 1 == size()) ? 0.5 * h_ : h_; }
  // at least eight nodes per oscillation of r^{+-im} in ln r
  bool resolves_mode(int m) const { return m * h_ <= 0.25 * 3.14159265358979323846; }
  RadialGrid refined() const { return RadialGrid(r_min(), r_max(), 2 * size() - 1); }

 private:
  double t0_, h_;
  std::vector<double> r_;
};

enum class Parity { Cos, Sin };

struct ModeField {
  int mode = 0;
  Parity parity = Parity::Cos;
  std::vector<Eigen::VectorXd> comp;  // one vector per component, values at the grid nodes
};

// f'' + f'/r - m^2 f/r^2 by fourth-order differences in ln r
ModeField laplacian_mode(const ModeField& f, const RadialGrid& grid);

struct WeightedNormReport {
  double norm_star = 0.0;
  double norm_starstar = 0.0;
  double alpha = 0.5;
};

// values on radii (any angle); the angular factor is taken as given
WeightedNormReport weighted_norms(const std::vector<double>& radii, const std::vector<double>& values, double alpha);

// polar sampling: radial grid times n_theta equally spaced angles
struct PolarGrid {
  RadialGrid radial;
  int n_theta = 1;
  double theta(int j) const { return 2.0 * 3.14159265358979323846 * j / n_theta; }
  int max_mode() const { return (n_theta - 1) / 2; }
};

struct Field2D {
  std::array<Eigen::MatrixXd, 2> c;  // (radius, angle)

  static Field2D zeros(const PolarGrid& g);
  Field2D& operator+=(const Field2D& o);
  Field2D& operator*=(double s);
  double max_abs() const;
};

Field2D operator+(Field2D a, const Field2D& b);
Field2D operator*(double s, Field2D a);

WeightedNormReport weighted_norms(const PolarGrid& g, const Field2D& f, double alpha);

// Fourier coefficient of one component: (1/n) sum for m = 0, (2/n) sum cos/sin otherwise
ModeField extract_mode(const PolarGrid& g, const Field2D& f, int m, Parity parity);
void add_mode(const PolarGrid& g, const ModeField& mf, Field2D& f);

// int over the plane of sum_c a_c b_c via trapezoid rules in ln r and theta
double inner_product(const PolarGrid& g, const Field2D& a, const Field2D& b);

// generic radial problem for one angular mode:
//   (phi_tt - m^2 phi)/r^2 + C(r) phi = rhs + sum_i mult_i zstar_i
// with <dz_i, phi> = 0 for every deflated direction
struct DeflationVector {
  std::vector<Eigen::VectorXd> dz;     // constraint density, per component
  std::vector<Eigen::VectorXd> zstar;  // multiplier column, per component
  bool multiplier = true;
};

struct ModeProblem {
  int ncomp = 2;
  int mode = 0;
  // coupling at node k, row-major ncomp x ncomp
  std::function<void(int k, double* C)> coupling;
  std::vector<DeflationVector> deflate;
  bool borders = true;
  double orth_tol = 1e-8;
};

struct ModeSolution {
  ModeField phi;
  std::vector<double> multipliers;
  std::vector<double> slopes;
};

ModeSolution solve_mode_problem(const ModeProblem& prob, const RadialGrid& grid, const ModeField& rhs);

// L applied with the same second-order stencil as the solver (interior nodes)
ModeField apply_mode_operator(const ModeProblem& prob, const RadialGrid& grid, const ModeField& phi);

// linearized G2 Toda operator at the radial ground state, deflated against the kernels of mode m
ModeSolution solve_linearized_mode(const TodaParams& p, int m, Parity parity, const ModeField& rhs,
                                   const std::vector<KernelTag>& deflate, const RadialGrid& grid,
                                   bool borders = true);

// kernels whose mode and parity match
std::vector<KernelTag> kernels_of_mode(const TodaParams& p, int m, Parity parity);

struct LinearSolve2D {
  Field2D phi;
  PerturbVector multipliers{};  // coefficient of Z*_i, indexed like PerturbVector
};

// mode-by-mode solve of the linearized system with full deflation
LinearSolve2D solve_linearized(const TodaParams& p, const PolarGrid& g, const Field2D& rhs, Exec exec = Exec::Parallel);

}  // namespace g2toda
